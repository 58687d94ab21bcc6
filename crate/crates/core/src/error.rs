//! Error type shared across the workspace.

use std::path::PathBuf;

/// Unified error for model construction, dynamics, linear algebra, and I/O.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument violates a documented precondition (bad node count,
    /// nonpositive period, parity mismatch, index out of range, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A state left the set the model is defined on (nonpositive or
    /// duplicate-phase configurations).
    #[error("degenerate state: {0}")]
    DegenerateState(String),

    /// A force drove a gap out of (0, T]; the update is not applied.
    #[error("overshoot at node {node}: gap would become {value}")]
    Overshoot { node: usize, value: f64 },

    /// The requested analysis is not defined at this size.
    #[error("unsupported size n={n}: {reason}")]
    UnsupportedSize { n: usize, reason: &'static str },

    /// A numerical procedure failed to converge or produced non-finite data.
    #[error("numerical failure in {provenance}: {detail}")]
    Numerical { provenance: String, detail: String },

    /// Inconsistent run configuration (topology size mismatch, bad stride, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// A finite-difference probe failed while perturbing one coordinate.
    #[error("probe of column {column} failed: {source}")]
    Probe {
        column: usize,
        #[source]
        source: Box<Error>,
    },

    /// Filesystem failure, annotated with the path involved.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Input file did not parse.
    #[error("parse error in {path}: {detail}")]
    Parse { path: PathBuf, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
