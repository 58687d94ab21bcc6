//! Deterministic serialization of matrices, stability reports, and
//! simulation traces to JSON and CSV.
//!
//! Output is byte-stable for fixed inputs: object keys are emitted in sorted
//! order, floats are printed with 17 significant digits (enough to round-trip
//! an `f64` exactly), `-0.0` is normalized to `0.0`, and non-finite values
//! are rejected rather than written.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::jacobian::JacobianMatrix;
use crate::scalar::Real;
use crate::sim::RunResult;
use crate::spectral::{StabilityReport, StabilityThresholds};

/// Output encoding for [`export_matrix`] and friends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

impl ExportFormat {
    /// Picks the format from a file extension: `.csv` (any case) means CSV,
    /// anything else means JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => ExportFormat::Csv,
            _ => ExportFormat::Json,
        }
    }
}

/// Formats one scalar with 17 significant digits in scientific notation.
fn fmt_float<F: Real>(value: F) -> Result<String> {
    let v = value.as_f64();
    if !v.is_finite() {
        return Err(Error::Numerical {
            provenance: "export".into(),
            detail: format!("refusing to serialize non-finite value {v}"),
        });
    }
    let v = if v == 0.0 { 0.0 } else { v };
    Ok(format!("{v:.16e}"))
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn float_array<F: Real>(values: impl IntoIterator<Item = F>) -> Result<String> {
    let parts: Result<Vec<String>> = values.into_iter().map(fmt_float).collect();
    Ok(format!("[{}]", parts?.join(",")))
}

/// Matrix as `{"entries": [row-major], "n": ..., "provenance": "..."}`.
pub fn matrix_to_json<F: Real>(matrix: &JacobianMatrix<F>) -> Result<String> {
    let n = matrix.n();
    let entries = (0..n).flat_map(|r| (0..n).map(move |c| (r, c)));
    let entries = float_array(entries.map(|(r, c)| matrix.get(r, c)))?;
    Ok(format!(
        "{{\"entries\":{entries},\"n\":{n},\"provenance\":{}}}\n",
        json_string(matrix.provenance().label()),
    ))
}

/// Matrix as bare CSV, one row per line, no header.
pub fn matrix_to_csv<F: Real>(matrix: &JacobianMatrix<F>) -> Result<String> {
    let n = matrix.n();
    let mut out = String::new();
    for r in 0..n {
        let cells: Result<Vec<String>> = (0..n).map(|c| fmt_float(matrix.get(r, c))).collect();
        out.push_str(&cells?.join(","));
        out.push('\n');
    }
    Ok(out)
}

fn thresholds_object<F: Real>(t: &StabilityThresholds<F>) -> Result<String> {
    Ok(format!(
        "{{\"single_hop_eigen\":{},\"single_hop_hirst_macey\":{},\"star_gershgorin\":{}}}",
        fmt_float(t.single_hop_eigen)?,
        fmt_float(t.single_hop_hirst_macey)?,
        fmt_float(t.star_gershgorin)?,
    ))
}

/// The three node-count limits as a small JSON object.
pub fn thresholds_to_json<F: Real>(t: &StabilityThresholds<F>) -> Result<String> {
    Ok(format!("{}\n", thresholds_object(t)?))
}

/// Stability report with eigenvalues as `[re, im]` pairs.
pub fn report_to_json<F: Real>(report: &StabilityReport<F>) -> Result<String> {
    let certificates: Result<Vec<String>> = report
        .certificates
        .iter()
        .map(|c| {
            Ok(format!(
                "{{\"bound\":{},\"name\":{},\"satisfied\":{}}}",
                fmt_float(c.bound)?,
                json_string(c.name),
                c.satisfied,
            ))
        })
        .collect();
    let eigenvalues: Result<Vec<String>> = report
        .eigenvalues
        .iter()
        .map(|z| Ok(format!("[{},{}]", fmt_float(z.re)?, fmt_float(z.im)?)))
        .collect();
    Ok(format!(
        "{{\"certificates\":[{}],\"eigenvalues\":[{}],\"mode\":{},\"n\":{},\"spectral_radius\":{},\"thresholds\":{},\"verdict\":{}}}\n",
        certificates?.join(","),
        eigenvalues?.join(","),
        json_string(report.mode.label()),
        report.n,
        fmt_float(report.spectral_radius)?,
        thresholds_object(&report.thresholds)?,
        json_string(report.verdict.label()),
    ))
}

/// Simulation outcome with the full recorded trace.
pub fn run_to_json<F: Real>(result: &RunResult<F>) -> Result<String> {
    let failure = match &result.failure {
        None => "null".to_string(),
        Some(f) => format!(
            "{{\"message\":{},\"round\":{}}}",
            json_string(&f.message),
            f.round
        ),
    };
    let trace: Result<Vec<String>> = result
        .trace
        .iter()
        .map(|rec| {
            Ok(format!(
                "{{\"desync_error\":{},\"gaps\":{},\"max_force\":{},\"round\":{}}}",
                fmt_float(rec.desync_error)?,
                float_array(rec.gaps.iter().copied())?,
                fmt_float(rec.max_force)?,
                rec.round,
            ))
        })
        .collect();
    Ok(format!(
        "{{\"converged\":{},\"failure\":{failure},\"final_error\":{},\"rounds_executed\":{},\"trace\":[{}]}}\n",
        result.converged,
        fmt_float(result.final_error)?,
        result.rounds_executed,
        trace?.join(","),
    ))
}

/// Trace as long-form CSV: one line per node per recorded round, with the
/// fixed header `round,node,gap,desync_error`.
pub fn trace_to_csv<F: Real>(result: &RunResult<F>) -> Result<String> {
    let mut out = String::from("round,node,gap,desync_error\n");
    for rec in &result.trace {
        let error = fmt_float(rec.desync_error)?;
        for (node, &gap) in rec.gaps.iter().enumerate() {
            let _ = writeln!(out, "{},{node},{},{error}", rec.round, fmt_float(gap)?);
        }
    }
    Ok(out)
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(|source| Error::Io {
        path: PathBuf::from(path),
        source,
    })
}

/// Serializes a matrix to `path` in the requested format.
pub fn export_matrix<F: Real>(
    matrix: &JacobianMatrix<F>,
    path: &Path,
    format: ExportFormat,
) -> Result<()> {
    let content = match format {
        ExportFormat::Csv => matrix_to_csv(matrix)?,
        ExportFormat::Json => matrix_to_json(matrix)?,
    };
    write_file(path, &content)
}

/// Serializes a stability report to `path`. Reports have no CSV schema, so
/// the format argument must be JSON.
pub fn export_report<F: Real>(
    report: &StabilityReport<F>,
    path: &Path,
    format: ExportFormat,
) -> Result<()> {
    match format {
        ExportFormat::Json => write_file(path, &report_to_json(report)?),
        ExportFormat::Csv => Err(Error::Config(
            "stability reports export as json only".into(),
        )),
    }
}

/// Serializes a simulation outcome to `path`: long-form trace CSV, or the
/// full result as JSON.
pub fn export_run<F: Real>(result: &RunResult<F>, path: &Path, format: ExportFormat) -> Result<()> {
    let content = match format {
        ExportFormat::Csv => trace_to_csv(result)?,
        ExportFormat::Json => run_to_json(result)?,
    };
    write_file(path, &content)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobian::{jacobian_single_hop, Parity};
    use crate::model::SystemConfig;
    use crate::sim::{run_simulation, InitialState, SimConfig, SimMode};
    use crate::spectral::{stability_report, stability_thresholds, ReportMode};

    fn sample_run() -> RunResult<f64> {
        let mut config = SimConfig::new(SimMode::MultiHop, 6, 1000.0, 12);
        config.init = InitialState::Random { seed: 99 };
        config.stride = 3;
        run_simulation(&config).unwrap()
    }

    #[test]
    fn float_formatting_is_fixed_width_and_normalized() {
        assert_eq!(fmt_float(250.0f64).unwrap(), "2.5000000000000000e2");
        assert_eq!(fmt_float(-0.0f64).unwrap(), "0.0000000000000000e0");
        assert_eq!(fmt_float(1.0f64 / 3.0).unwrap(), "3.3333333333333331e-1");
        assert!(fmt_float(f64::NAN).is_err());
        assert!(fmt_float(f64::INFINITY).is_err());
    }

    #[test]
    fn formatted_floats_round_trip_exactly() {
        let values = [1.0 / 3.0, 0.038597, 2.2250738585072014e-308, 1e300, -7.25];
        for &v in &values {
            let parsed: f64 = fmt_float(v).unwrap().parse().unwrap();
            assert_eq!(parsed, v);
        }
    }

    #[test]
    fn exports_are_byte_identical_across_calls() {
        let run = sample_run();
        assert_eq!(run_to_json(&run).unwrap(), run_to_json(&run).unwrap());
        assert_eq!(trace_to_csv(&run).unwrap(), trace_to_csv(&run).unwrap());

        let config = SystemConfig::new(8, 1000.0).unwrap();
        let matrix = jacobian_single_hop(&config, Parity::Even).unwrap();
        assert_eq!(
            matrix_to_json(&matrix).unwrap(),
            matrix_to_json(&matrix).unwrap()
        );
    }

    #[test]
    fn matrix_json_round_trips_row_major() {
        let config = SystemConfig::new(4, 1000.0).unwrap();
        let matrix = jacobian_single_hop(&config, Parity::Even).unwrap();
        let parsed: serde_json::Value =
            serde_json::from_str(&matrix_to_json(&matrix).unwrap()).unwrap();
        assert_eq!(parsed["n"], 4);
        assert_eq!(parsed["provenance"], "analytic-single-hop");
        let entries = parsed["entries"].as_array().unwrap();
        assert_eq!(entries.len(), 16);
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(entries[4 * r + c].as_f64().unwrap(), matrix.get(r, c));
            }
        }
    }

    #[test]
    fn matrix_csv_has_one_row_per_line() {
        let config = SystemConfig::new(4, 1000.0).unwrap();
        let matrix = jacobian_single_hop(&config, Parity::Even).unwrap();
        let csv = matrix_to_csv(&matrix).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0].split(',').count(), 4);
        let first: f64 = lines[1].split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(first, matrix.get(1, 2));
    }

    #[test]
    fn run_json_round_trips_values() {
        let run = sample_run();
        let parsed: serde_json::Value = serde_json::from_str(&run_to_json(&run).unwrap()).unwrap();
        assert_eq!(parsed["converged"].as_bool().unwrap(), run.converged);
        assert_eq!(
            parsed["rounds_executed"].as_u64().unwrap() as usize,
            run.rounds_executed
        );
        assert_eq!(parsed["final_error"].as_f64().unwrap(), run.final_error);
        let trace = parsed["trace"].as_array().unwrap();
        assert_eq!(trace.len(), run.trace.len());
        for (row, rec) in trace.iter().zip(&run.trace) {
            assert_eq!(row["round"].as_u64().unwrap() as usize, rec.round);
            assert_eq!(row["desync_error"].as_f64().unwrap(), rec.desync_error);
            assert_eq!(row["max_force"].as_f64().unwrap(), rec.max_force);
            let gaps = row["gaps"].as_array().unwrap();
            for (value, &gap) in gaps.iter().zip(&rec.gaps) {
                assert_eq!(value.as_f64().unwrap(), gap);
            }
        }
        match &run.failure {
            None => assert!(parsed["failure"].is_null()),
            Some(f) => {
                assert_eq!(
                    parsed["failure"]["round"].as_u64().unwrap() as usize,
                    f.round
                )
            }
        }
    }

    #[test]
    fn trace_csv_uses_the_fixed_header_and_long_form() {
        let run = sample_run();
        let csv = trace_to_csv(&run).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "round,node,gap,desync_error");
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), run.trace.len() * 6);
        let first: Vec<&str> = rows[0].split(',').collect();
        assert_eq!(first[0], "0");
        assert_eq!(first[1], "0");
        let gap: f64 = first[2].parse().unwrap();
        assert_eq!(gap, run.trace[0].gaps[0]);
    }

    #[test]
    fn report_json_matches_the_documented_schema() {
        let config = SystemConfig::new(8, 1000.0).unwrap();
        let report = stability_report(&config, ReportMode::Star, None).unwrap();
        let json = report_to_json(&report).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["n"], 8);
        assert_eq!(parsed["mode"], "star");
        assert_eq!(parsed["verdict"], "stable");
        assert_eq!(
            parsed["spectral_radius"].as_f64().unwrap(),
            report.spectral_radius
        );
        let eigenvalues = parsed["eigenvalues"].as_array().unwrap();
        assert_eq!(eigenvalues.len(), 8);
        assert_eq!(
            eigenvalues[0][0].as_f64().unwrap(),
            report.eigenvalues[0].re
        );
        let certs = parsed["certificates"].as_array().unwrap();
        assert_eq!(certs.len(), report.certificates.len());
        assert_eq!(certs[0]["name"], report.certificates[0].name);
        assert_eq!(
            parsed["thresholds"]["star_gershgorin"].as_f64().unwrap(),
            report.thresholds.star_gershgorin
        );
        // keys come out sorted
        let order = [
            "certificates",
            "eigenvalues",
            "mode",
            "n",
            "spectral_radius",
            "thresholds",
            "verdict",
        ];
        let mut last = 0usize;
        for key in order {
            let pos = json.find(&format!("\"{key}\":")).unwrap();
            assert!(pos >= last);
            last = pos;
        }
    }

    #[test]
    fn thresholds_json_is_self_contained() {
        let json = thresholds_to_json(&stability_thresholds::<f64>()).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        let eigen = parsed["single_hop_eigen"].as_f64().unwrap();
        assert!((eigen / 3.179543e9 - 1.0).abs() < 1e-4);
    }

    #[test]
    fn io_failures_carry_the_path() {
        let run = sample_run();
        let path = Path::new("/nonexistent-dir-for-sure/out.json");
        match export_run(&run, path, ExportFormat::Json) {
            Err(Error::Io { path: p, .. }) => assert_eq!(p, path),
            other => panic!("expected io error, got {other:?}"),
        }
    }

    #[test]
    fn report_csv_is_rejected() {
        let config = SystemConfig::new(8, 1000.0).unwrap();
        let report = stability_report(&config, ReportMode::Star, None).unwrap();
        let result = export_report(&report, Path::new("/tmp/x.csv"), ExportFormat::Csv);
        assert!(matches!(result, Err(Error::Config(_))));
    }

    #[test]
    fn format_is_inferred_from_the_extension() {
        assert_eq!(
            ExportFormat::from_path(Path::new("a/b.csv")),
            ExportFormat::Csv
        );
        assert_eq!(
            ExportFormat::from_path(Path::new("a/b.CSV")),
            ExportFormat::Csv
        );
        assert_eq!(
            ExportFormat::from_path(Path::new("a/b.json")),
            ExportFormat::Json
        );
        assert_eq!(
            ExportFormat::from_path(Path::new("a/b")),
            ExportFormat::Json
        );
    }
}
