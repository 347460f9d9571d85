use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("|alpha|^2 = {norm_sqr:.4} exceeds the guard band {limit:.4} (cutoff/4) at alpha = {alpha}")]
    GuardBandViolation {
        alpha: Complex64,
        norm_sqr: f64,
        limit: f64,
    },

    #[error("space mismatch: {left} vs {right}")]
    SpaceMismatch { left: String, right: String },

    #[error("index {index} outside a space of dimension {dim}")]
    IndexOutOfSpace { index: usize, dim: usize },

    #[error("operator is not Hermitian (max |H - H^dagger| = {deviation:.3e})")]
    NonHermitianInput { deviation: f64 },

    #[error("degenerate parameters: {0}")]
    DegenerateParams(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coarse-graining window {window:.4} does not fit in a span of {span:.4}")]
    WindowTooLarge { window: f64, span: f64 },

    #[error("fit design matrix is ill-conditioned (condition number {condition:.3e})")]
    IllConditionedFit { condition: f64 },

    #[error("unsupported state: {0}")]
    UnsupportedState(String),

    #[error("malformed criteria at line {line}: {reason}")]
    MalformedCriteria { line: usize, reason: String },

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Linalg(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
