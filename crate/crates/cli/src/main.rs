//! `desync` — command-line front end for the period-ring laboratory.
//!
//! Subcommands: `simulate` iterates the single- or multi-hop dynamics and
//! writes a trace; `jacobian` exports an equilibrium Jacobian (optionally
//! cross-checked against a finite-difference probe); `stability` writes a
//! spectral stability report; `thresholds` prints the closed-form node-count
//! limits. Exit codes: 0 success, 2 configuration error, 3 numerical failure
//! (overshoot, non-convergence of a solver, failed cross-check), 4 I/O error.
//! `DESYNC_LOG={error|info|debug}` controls diagnostics on standard error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use desync_core::export::{
    export_matrix, export_report, export_run, thresholds_to_json, ExportFormat,
};
use desync_core::jacobian::{
    finite_difference_jacobian, jacobian_multihop, jacobian_single_hop, jacobian_star,
    multihop_step_map, single_hop_step_map, JacobianMatrix, Parity,
};
use desync_core::model::{
    perception_matrix, GapVector, PerceptionMatrix, PerceptionMode, SystemConfig, Topology,
};
use desync_core::sim::{run_simulation, InitialState, Perturbation, SimConfig, SimMode};
use desync_core::spectral::{stability_report, stability_thresholds, ReportMode};
use desync_core::{Error, Result};

const FD_TOLERANCE: f64 = 1e-5;

/// Largest node count the dense `jacobian`/`stability` paths accept. An n-node
/// analysis materializes an n x n matrix and (for reports) runs an O(n^3)
/// eigendecomposition; past this point the closed-form `thresholds` command is
/// the practical route, so refuse cleanly instead of exhausting memory.
const MAX_DENSE_N: usize = 4096;

#[derive(Parser)]
#[command(
    name = "desync",
    version,
    about = "Desynchronization dynamics on a shared period ring",
    long_about = "Simulates single-hop and multi-hop desynchronization dynamics and \
                  analyzes their equilibrium Jacobians. The convergence metric reported \
                  everywhere as `desync_error` is the maximum deviation of any gap from \
                  the even spacing T/n."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate the dynamics from a chosen initial state and write the trace
    Simulate(SimulateArgs),
    /// Export an equilibrium Jacobian, optionally cross-checked by finite differences
    Jacobian(JacobianArgs),
    /// Compute eigenvalues, certificates, and a stability verdict
    Stability(StabilityArgs),
    /// Print the closed-form node-count stability thresholds
    Thresholds(ThresholdsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SimModeArg {
    /// One node adjusts per round, from reciprocal partial gap sums
    Single,
    /// All nodes adjust synchronously, from perception-masked forces
    Multi,
}

#[derive(Clone, Copy, ValueEnum)]
enum PerceptionArg {
    /// Perceive direct topology neighbors only
    OneHop,
    /// Also perceive beacons relayed once (two-hop reach)
    TwoHop,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    /// All gaps at T/n
    Equilibrium,
    /// Seeded uniform draw on the gap simplex
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnalysisModeArg {
    /// Single-hop dynamics, even node count
    SingleEven,
    /// Single-hop dynamics, odd node count
    SingleOdd,
    /// Multi-hop dynamics under full perception (circulant form)
    Star,
    /// Multi-hop dynamics under an arbitrary perception matrix
    General,
}

#[derive(Args)]
struct SimulateArgs {
    /// Which dynamics to iterate
    #[arg(long, value_enum)]
    mode: SimModeArg,
    /// Node count
    #[arg(long)]
    n: usize,
    /// Shared period in milliseconds
    #[arg(long)]
    period: f64,
    /// Communication graph: star|chain|full|ring or a JSON file path
    #[arg(long)]
    topology: Option<String>,
    /// Perception reach derived from the topology (multi-hop only)
    #[arg(long, value_enum, default_value = "two-hop")]
    perception: PerceptionArg,
    /// Initial state
    #[arg(long, value_enum, default_value = "equilibrium")]
    init: InitArg,
    /// RNG seed for --init random
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Shift one node's firing phase by this much (ms) before starting
    #[arg(long, requires = "perturb_node")]
    perturb: Option<f64>,
    /// Which node receives the phase shift
    #[arg(long, requires = "perturb")]
    perturb_node: Option<usize>,
    /// Number of rounds (map applications) to run
    #[arg(long)]
    rounds: usize,
    /// Record the trace every this-many rounds
    #[arg(long, default_value_t = 1)]
    stride: usize,
    /// Group each single-hop round into n consecutive firings
    #[arg(long)]
    sweep: bool,
    /// Output file
    #[arg(long)]
    out: PathBuf,
    /// Output encoding (default: by --out extension, CSV when unrecognized)
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args)]
struct JacobianArgs {
    /// Which equilibrium Jacobian to build
    #[arg(long, value_enum)]
    mode: AnalysisModeArg,
    /// Node count
    #[arg(long)]
    n: usize,
    /// Shared period in milliseconds
    #[arg(long)]
    period: f64,
    /// Communication graph for --mode general: star|chain|full|ring or a JSON file
    #[arg(long)]
    topology: Option<String>,
    /// Cross-check the analytic matrix against a finite-difference probe
    #[arg(long)]
    fd_check: bool,
    /// Output file (.csv for CSV, anything else for JSON)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct StabilityArgs {
    /// Which equilibrium Jacobian to analyze
    #[arg(long, value_enum)]
    mode: AnalysisModeArg,
    /// Node count
    #[arg(long)]
    n: usize,
    /// Shared period in milliseconds
    #[arg(long)]
    period: f64,
    /// Communication graph for --mode general: star|chain|full|ring or a JSON file
    #[arg(long)]
    topology: Option<String>,
    /// Output file (JSON)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ThresholdsArgs {
    /// Output file; prints to stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_topology(descriptor: &str, n: usize) -> Result<Topology> {
    let topology = match descriptor {
        "star" => Topology::star(n)?,
        "chain" => Topology::chain(n)?,
        "full" => Topology::full(n)?,
        "ring" => Topology::ring(n)?,
        path => Topology::from_file(Path::new(path))?,
    };
    if topology.n() != n {
        return Err(Error::Config(format!(
            "topology file describes {} nodes but --n is {n}",
            topology.n()
        )));
    }
    Ok(topology)
}

fn general_perception(
    topology: &Option<String>,
    n: usize,
    mode: PerceptionMode,
) -> Result<PerceptionMatrix> {
    let topology = match topology {
        Some(descriptor) => parse_topology(descriptor, n)?,
        None => Topology::full(n)?,
    };
    perception_matrix(&topology, mode)
}

fn run_simulate(args: &SimulateArgs) -> Result<u8> {
    let mut config = SimConfig::new(
        match args.mode {
            SimModeArg::Single => SimMode::SingleHop,
            SimModeArg::Multi => SimMode::MultiHop,
        },
        args.n,
        args.period,
        args.rounds,
    );
    if let Some(descriptor) = &args.topology {
        config.topology = Some(parse_topology(descriptor, args.n)?);
    }
    config.perception_mode = match args.perception {
        PerceptionArg::OneHop => PerceptionMode::OneHop,
        PerceptionArg::TwoHop => PerceptionMode::TwoHop,
    };
    config.init = match args.init {
        InitArg::Equilibrium => InitialState::Equilibrium,
        InitArg::Random => InitialState::Random { seed: args.seed },
    };
    if let (Some(magnitude), Some(node)) = (args.perturb, args.perturb_node) {
        config.perturbation = Some(Perturbation { magnitude, node });
    }
    config.stride = args.stride;
    config.sweep = args.sweep;

    let result = run_simulation(&config)?;
    let format = match args.format {
        Some(FormatArg::Csv) => ExportFormat::Csv,
        Some(FormatArg::Json) => ExportFormat::Json,
        None => match args.out.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => ExportFormat::Json,
            _ => ExportFormat::Csv,
        },
    };
    export_run(&result, &args.out, format)?;
    log::info!(
        "simulate: {} rounds executed, final desync error {:.6e}, converged={}",
        result.rounds_executed,
        result.final_error,
        result.converged
    );
    if let Some(failure) = &result.failure {
        eprintln!(
            "error: run stopped at round {}: {} (trace written to {})",
            failure.round,
            failure.message,
            args.out.display()
        );
        return Ok(3);
    }
    Ok(0)
}

struct Analysis {
    matrix: JacobianMatrix<f64>,
    perception: Option<PerceptionMatrix>,
}

fn build_analysis(
    mode: AnalysisModeArg,
    topology: &Option<String>,
    config: &SystemConfig<f64>,
) -> Result<Analysis> {
    let n = config.n();
    if n > MAX_DENSE_N {
        return Err(Error::UnsupportedSize {
            n,
            reason: "dense analysis is capped at n = 4096; \
                     use `thresholds` for closed-form stability bounds at scale",
        });
    }
    match mode {
        AnalysisModeArg::SingleEven => Ok(Analysis {
            matrix: jacobian_single_hop(config, Parity::Even)?,
            perception: None,
        }),
        AnalysisModeArg::SingleOdd => Ok(Analysis {
            matrix: jacobian_single_hop(config, Parity::Odd)?,
            perception: None,
        }),
        AnalysisModeArg::Star => {
            if topology.is_some() {
                log::info!("star mode fixes full perception; --topology ignored");
            }
            Ok(Analysis {
                matrix: jacobian_star(config)?,
                perception: Some(PerceptionMatrix::complete(n)?),
            })
        }
        AnalysisModeArg::General => {
            let perception = general_perception(topology, n, PerceptionMode::TwoHop)?;
            let equilibrium = GapVector::equilibrium(n, config.period())?;
            Ok(Analysis {
                matrix: jacobian_multihop(&equilibrium, &perception, config)?,
                perception: Some(perception),
            })
        }
    }
}

fn run_jacobian(args: &JacobianArgs) -> Result<u8> {
    let config = SystemConfig::new(args.n, args.period)?;
    let analysis = build_analysis(args.mode, &args.topology, &config)?;
    export_matrix(
        &analysis.matrix,
        &args.out,
        ExportFormat::from_path(&args.out),
    )?;
    if !args.fd_check {
        return Ok(0);
    }
    let equilibrium = GapVector::equilibrium(args.n, args.period)?;
    let h = args.period * 1e-6;
    let fd = match &analysis.perception {
        None => finite_difference_jacobian(single_hop_step_map(&config), &equilibrium, h)?,
        Some(p) => finite_difference_jacobian(multihop_step_map(&config, p), &equilibrium, h)?,
    };
    let deviation = analysis.matrix.max_abs_difference(&fd)?;
    println!("fd-check max abs deviation: {deviation:.3e}");
    if deviation > FD_TOLERANCE {
        eprintln!(
            "error: analytic jacobian deviates {deviation:.3e} from the finite-difference probe \
             (tolerance {FD_TOLERANCE:.0e})"
        );
        return Ok(3);
    }
    Ok(0)
}

fn run_stability(args: &StabilityArgs) -> Result<u8> {
    let config = SystemConfig::new(args.n, args.period)?;
    if args.n > MAX_DENSE_N {
        return Err(Error::UnsupportedSize {
            n: args.n,
            reason: "dense analysis is capped at n = 4096; \
                     use `thresholds` for closed-form stability bounds at scale",
        });
    }
    let (mode, perception) = match args.mode {
        AnalysisModeArg::SingleEven => (ReportMode::SingleHopEven, None),
        AnalysisModeArg::SingleOdd => (ReportMode::SingleHopOdd, None),
        AnalysisModeArg::Star => {
            if args.topology.is_some() {
                log::info!("star mode fixes full perception; --topology ignored");
            }
            (ReportMode::Star, None)
        }
        AnalysisModeArg::General => (
            ReportMode::General,
            Some(general_perception(
                &args.topology,
                args.n,
                PerceptionMode::TwoHop,
            )?),
        ),
    };
    let report = stability_report(&config, mode, perception.as_ref())?;
    log::info!(
        "stability: n={} mode={} spectral radius {:.12} verdict {}",
        report.n,
        report.mode.label(),
        report.spectral_radius,
        report.verdict.label()
    );
    export_report(&report, &args.out, ExportFormat::from_path(&args.out))?;
    Ok(0)
}

fn run_thresholds(args: &ThresholdsArgs) -> Result<u8> {
    let json = thresholds_to_json(&stability_thresholds::<f64>())?;
    match &args.out {
        Some(path) => std::fs::write(path, &json).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?,
        None => print!("{json}"),
    }
    Ok(0)
}

fn exit_code(error: &Error) -> u8 {
    match error {
        Error::Domain(_)
        | Error::Config(_)
        | Error::UnsupportedSize { .. }
        | Error::Parse { .. } => 2,
        Error::DegenerateState(_) | Error::Overshoot { .. } | Error::Numerical { .. } => 3,
        Error::Probe { source, .. } => exit_code(source),
        Error::Io { .. } => 4,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("DESYNC_LOG", "error"))
        .init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Simulate(args) => run_simulate(args),
        Command::Jacobian(args) => run_jacobian(args),
        Command::Stability(args) => run_stability(args),
        Command::Thresholds(args) => run_thresholds(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
