//! Round-based simulation driver: initial-state construction, perturbation
//! injection, trajectory iteration, and convergence bookkeeping.
//!
//! A round is one application of the analyzed map — one firing for the
//! single-hop dynamics (or a whole `n`-firing sweep with [`SimConfig::sweep`])
//! and one synchronous transition for the multi-hop dynamics — so trace rows
//! align one-to-one with what the equilibrium Jacobians predict.

use crate::dwarf::{single_hop_force, step_single_hop};
use crate::error::{Error, Result};
use crate::mdwarf::{step_multihop, total_force};
use crate::model::{
    perception_matrix, GapVector, PerceptionMatrix, PerceptionMode, SystemConfig, Topology,
};
use crate::scalar::Real;
use rand::{RngExt, SeedableRng};

/// Which dynamics a run iterates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimMode {
    SingleHop,
    MultiHop,
}

/// How the starting gap vector is produced.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState<F: Real> {
    /// All gaps at `T/n`.
    Equilibrium,
    /// Uniform on the gap simplex (symmetric Dirichlet scaled to `T`),
    /// rejecting states with any gap below `T/(10n²)`; bit-reproducible for
    /// a fixed seed.
    Random { seed: u64 },
    /// Caller-supplied gaps, validated on entry.
    Explicit(Vec<F>),
}

/// A phase shift applied to one node before the run starts: the node fires
/// `magnitude` later, so its predecessor gap grows and its successor gap
/// shrinks by the same amount (the ring sum is untouched).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation<F: Real> {
    pub magnitude: F,
    pub node: usize,
}

/// Full description of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig<F: Real> {
    pub mode: SimMode,
    pub n: usize,
    pub period: F,
    /// Replaces the derived coupling constant when set.
    pub coupling_override: Option<F>,
    /// Communication graph; `None` means complete. Ignored by the single-hop
    /// dynamics, which only ever react to ring-adjacent beacons.
    pub topology: Option<Topology>,
    /// How perception is derived from the topology (multi-hop only).
    pub perception_mode: PerceptionMode,
    pub init: InitialState<F>,
    pub perturbation: Option<Perturbation<F>>,
    pub rounds: usize,
    /// Trace every this-many rounds (round 0 and the final round always
    /// recorded).
    pub stride: usize,
    /// Group each single-hop round into `n` consecutive firings.
    pub sweep: bool,
    /// Convergence cutoff on the final desync error; defaults to `1e−9·T`.
    pub convergence_threshold: Option<F>,
}

impl<F: Real> SimConfig<F> {
    /// Baseline configuration: equilibrium start, no perturbation, complete
    /// topology, two-hop perception, stride 1.
    pub fn new(mode: SimMode, n: usize, period: F, rounds: usize) -> Self {
        Self {
            mode,
            n,
            period,
            coupling_override: None,
            topology: None,
            perception_mode: PerceptionMode::TwoHop,
            init: InitialState::Equilibrium,
            perturbation: None,
            rounds,
            stride: 1,
            sweep: false,
            convergence_threshold: None,
        }
    }
}

/// One recorded trajectory snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord<F: Real> {
    pub round: usize,
    pub gaps: Vec<F>,
    pub desync_error: F,
    /// Largest force magnitude the recorded state would produce next.
    pub max_force: F,
}

/// Why a run stopped before its round budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimFailure {
    pub round: usize,
    pub message: String,
}

/// Outcome of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult<F: Real> {
    pub trace: Vec<TraceRecord<F>>,
    pub converged: bool,
    pub final_error: F,
    pub rounds_executed: usize,
    pub failure: Option<SimFailure>,
}

/// Distance from equilibrium: `max_i |Δᵢ − T/n|`.
pub fn desync_error<F: Real>(gaps: &GapVector<F>) -> F {
    gaps.max_deviation()
}

fn build_initial<F: Real>(config: &SimConfig<F>) -> Result<GapVector<F>> {
    let n = config.n;
    let period = config.period;
    match &config.init {
        InitialState::Equilibrium => GapVector::equilibrium(n, period),
        InitialState::Explicit(gaps) => {
            if gaps.len() != n {
                return Err(Error::Config(format!(
                    "explicit state has {} gaps, config says n={n}",
                    gaps.len()
                )));
            }
            GapVector::new(gaps.clone(), period)
        }
        InitialState::Random { seed } => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(*seed);
            let floor = period / F::from_count(10 * n * n);
            let mut rejected = 0usize;
            for _ in 0..10_000 {
                // exponential spacings normalized to the period: uniform on
                // the simplex of gap vectors
                let raw: Vec<F> = (0..n)
                    .map(|_| {
                        let u: f64 = rng.random();
                        F::from_literal(-(1.0 - u).ln())
                    })
                    .collect();
                let sum = raw.iter().copied().fold(F::zero(), |a, b| a + b);
                let gaps: Vec<F> = raw.iter().map(|&g| g * period / sum).collect();
                if gaps.iter().any(|&g| g < floor) {
                    rejected += 1;
                    continue;
                }
                if rejected > 0 {
                    log::debug!("random init: rejected {rejected} near-degenerate draws");
                }
                return GapVector::new(gaps, period);
            }
            Err(Error::Numerical {
                provenance: "random-initial-state".into(),
                detail: format!("10000 draws all had a gap below T/(10n²) at n={n}"),
            })
        }
    }
}

fn apply_perturbation<F: Real>(
    gaps: &GapVector<F>,
    perturbation: &Perturbation<F>,
) -> Result<GapVector<F>> {
    let n = gaps.len();
    if perturbation.node >= n {
        return Err(Error::Config(format!(
            "perturbation node {} out of range for n={n}",
            perturbation.node
        )));
    }
    let mut next = gaps.as_slice().to_vec();
    next[(perturbation.node + n - 1) % n] += perturbation.magnitude;
    next[perturbation.node] -= perturbation.magnitude;
    GapVector::new(next, gaps.period())
}

fn max_force_at<F: Real>(
    gaps: &GapVector<F>,
    system: &SystemConfig<F>,
    mode: SimMode,
    perception: &PerceptionMatrix,
) -> Result<F> {
    match mode {
        SimMode::SingleHop => Ok(single_hop_force(gaps, system)?.value.abs()),
        SimMode::MultiHop => {
            let mut worst = F::zero();
            for i in 0..gaps.len() {
                let f = total_force(gaps, perception, i, system)?.value.abs();
                if f > worst {
                    worst = f;
                }
            }
            Ok(worst)
        }
    }
}

/// Runs the configured dynamics, returning the trace and outcome.
///
/// Configuration problems (sizes, ranges, topology mismatches) surface as
/// errors before any round executes; an overshoot mid-run ends the run early
/// and is reported in [`RunResult::failure`] instead.
pub fn run_simulation<F: Real>(config: &SimConfig<F>) -> Result<RunResult<F>> {
    let n = config.n;
    if config.rounds < 1 {
        return Err(Error::Config("rounds must be at least 1".into()));
    }
    if config.stride < 1 {
        return Err(Error::Config("record stride must be at least 1".into()));
    }
    let min_n = match config.mode {
        SimMode::SingleHop => 3,
        SimMode::MultiHop => 4,
    };
    if n < min_n {
        return Err(Error::Config(format!(
            "mode needs at least {min_n} nodes, got {n}"
        )));
    }
    let system = match config.coupling_override {
        Some(k) => SystemConfig::with_coupling(n, config.period, k)?,
        None => SystemConfig::new(n, config.period)?,
    };
    if let Some(p) = &config.perturbation {
        if p.magnitude >= config.period / F::from_count(n) {
            return Err(Error::Config(format!(
                "perturbation magnitude {} reaches the equilibrium gap",
                p.magnitude.as_f64()
            )));
        }
    }
    let topology = match &config.topology {
        Some(t) => {
            if t.n() != n {
                return Err(Error::Config(format!(
                    "topology is over {} nodes, config says n={n}",
                    t.n()
                )));
            }
            t.clone()
        }
        None => Topology::full(n)?,
    };
    let perception = perception_matrix(&topology, config.perception_mode)?;

    let mut state = build_initial(config)?;
    if let Some(p) = &config.perturbation {
        state = apply_perturbation(&state, p)?;
    }

    let threshold = config
        .convergence_threshold
        .unwrap_or_else(|| F::from_literal(1e-9) * config.period);

    let mut trace = Vec::new();
    let record = |trace: &mut Vec<TraceRecord<F>>, round: usize, state: &GapVector<F>| {
        let max_force = max_force_at(state, &system, config.mode, &perception)?;
        trace.push(TraceRecord {
            round,
            gaps: state.as_slice().to_vec(),
            desync_error: desync_error(state),
            max_force,
        });
        Ok::<(), Error>(())
    };
    record(&mut trace, 0, &state)?;

    let mut failure = None;
    let mut rounds_executed = 0usize;
    'rounds: for round in 1..=config.rounds {
        let steps = match (config.mode, config.sweep) {
            (SimMode::SingleHop, true) => n,
            _ => 1,
        };
        for _ in 0..steps {
            let stepped = match config.mode {
                SimMode::SingleHop => step_single_hop(&state, &system),
                SimMode::MultiHop => step_multihop(&state, &perception, &system),
            };
            match stepped {
                Ok(next) => state = next,
                Err(e @ (Error::Overshoot { .. } | Error::DegenerateState(_))) => {
                    failure = Some(SimFailure {
                        round,
                        message: e.to_string(),
                    });
                    break 'rounds;
                }
                Err(e) => return Err(e),
            }
        }
        rounds_executed = round;
        if round % config.stride == 0 {
            record(&mut trace, round, &state)?;
        }
    }
    if trace.last().map(|r| r.round) != Some(rounds_executed) {
        record(&mut trace, rounds_executed, &state)?;
    }

    let final_error = desync_error(&state);
    Ok(RunResult {
        trace,
        converged: failure.is_none() && final_error <= threshold,
        final_error,
        rounds_executed,
        failure,
    })
}
