use thiserror::Error;

/// Errors produced by the solver, the harness and its file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid {n1}x{n2}: mode counts must be even and at least 4")]
    InvalidGrid { n1: usize, n2: usize },

    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: String, right: String },

    #[error("hermitian symmetry violated by {defect:e} at mode ({k1}, {k2})")]
    SymmetryViolation { defect: f64, k1: i64, k2: i64 },

    #[error("wavevector ({k1}, {k2}) is not usable here: {reason}")]
    InvalidMode { k1: i64, k2: i64, reason: &'static str },

    #[error("grid {n1}x{n2} exceeds the direct-convolution guard of {limit} points")]
    OracleTooLarge { n1: usize, n2: usize, limit: usize },

    #[error("galerkin level {level} exceeds the {available} basis elements resolved by the grid")]
    LevelTooLarge { level: usize, available: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("blow-up at t = {time} (step {step}); last finite state at t = {last_finite_time}")]
    BlowUp {
        time: f64,
        step: usize,
        last_finite_time: f64,
    },

    #[error("trajectory {index} of the ensemble failed: {source}")]
    Trajectory {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("noise model gate failed: {0}")]
    Gate(String),

    #[error(transparent)]
    Snapshot(#[from] crate::io::snapshot::SnapshotError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
