use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        actual: String,
    },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("flat index overflow for dims {0:?}")]
    IndexOverflow([usize; 4]),

    #[error(
        "conjugate symmetry violated in constraint stage: imaginary residue {residual:.3e} exceeds tolerance {tol:.3e}"
    )]
    ConjugateSymmetry { residual: f64, tol: f64 },

    #[error("negative amplitude entry {value:.3e} below tolerance in rank-1 factor")]
    NegativeAmplitude { value: f64 },

    #[error("iteration budget exhausted: {0}")]
    NonConvergence(String),

    #[error("loss became non-finite at iteration {iteration}")]
    NanLoss { iteration: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("malformed container file: {0}")]
    Container(String),
}
