use thiserror::Error;

/// Errors raised by the toolkit.
///
/// A rejected certificate is not an error: it is reported through
/// [`crate::certificates::Certificate::accepted`]. The variants here cover
/// malformed inputs and hypotheses that make a checker inapplicable.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HsError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid specification: {0}")]
    Spec(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("capacity exceeded: {requested} > {cap}; use sampling mode for large index sets")]
    Capacity { requested: usize, cap: usize },

    #[error("divergent series: {0}")]
    Divergence(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("I/O error: {0}")]
    Io(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, HsError>;

pub(crate) fn dim_err(msg: impl Into<String>) -> HsError {
    HsError::Dimension(msg.into())
}
