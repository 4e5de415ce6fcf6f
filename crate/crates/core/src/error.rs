use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the admissible domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The argument sits on the support (or a pole) of the transform.
    #[error("singularity: {0}")]
    Singularity(String),

    #[error("insufficient data: need {needed} moments, have {available}")]
    InsufficientData { needed: usize, available: usize },

    /// Quadrature did not reach its tolerance; the best estimate is kept.
    #[error("accuracy not reached: estimate {estimate:e} with error bound {error_bound:e}")]
    Accuracy { estimate: f64, error_bound: f64 },

    /// Root bracketing, iteration limits, extrapolation failures.
    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}
