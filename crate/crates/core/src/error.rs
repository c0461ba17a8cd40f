use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// LogSin evaluated exactly at a point; `f(0) = +inf`.
    #[error("singular evaluation of the log-sine kernel at 0")]
    SingularEvaluation,

    /// Fourier coefficient requested at k = 0; kernels are mean zero.
    #[error("mean-value frequency k = 0 requested")]
    MeanValueFrequency,

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// No grid candidate has potential at most `eps_pot`, even after refinement.
    #[error("no nonpositive candidate: best potential {best:e} exceeds gate {gate:e} at step {step}")]
    NoNonpositiveCandidate { step: usize, best: f64, gate: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("no points")]
    NoPoints,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }
}
