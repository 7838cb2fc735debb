use thiserror::Error;

/// Errors raised by profile validation, discretization, solvers and the scenario runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite {what} at s = {s}")]
    NonFinite { what: &'static str, s: f64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("no root found: {0}")]
    NoRoot(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("config error (line {line}): {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn ensure_finite(what: &'static str, s: f64, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { what, s })
    }
}
