use thiserror::Error;

/// Errors raised by the numerical kernel and the state model.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A validity check failed. `check` names the property (e.g. "trace",
    /// "hermitian", "psd", "normalization").
    #[error("validation failed ({check}): {detail}")]
    Validation { check: &'static str, detail: String },

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("eigensolver did not converge after {0} sweeps")]
    NotConverged(usize),

    #[error("verification failed: {0}")]
    Verification(String),
}

impl Error {
    pub(crate) fn validation(check: &'static str, detail: impl Into<String>) -> Self {
        Error::Validation {
            check,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
