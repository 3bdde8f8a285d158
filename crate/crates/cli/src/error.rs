use thiserror::Error;

use crate::format::ParseError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_IO_OR_PARSE: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: ParseError,
    },
    #[error(transparent)]
    Core(#[from] eoa_core::Error),
    #[error("verification failed: {0}")]
    Verification(String),
}

fn core_exit_code(e: &eoa_core::Error) -> i32 {
    use eoa_core::Error::*;
    match e {
        Dimension(_) | Validation { .. } | Unsupported(_) => EXIT_VALIDATION,
        NotConverged(_) | Verification(_) => EXIT_VERIFICATION,
    }
}

impl CliError {
    /// 1 validation (including entry-count/dimension mismatches), 2 I/O or
    /// syntax, 3 verification or numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => EXIT_IO_OR_PARSE,
            CliError::Parse { source, .. } => match source {
                ParseError::Syntax { .. } => EXIT_IO_OR_PARSE,
                ParseError::Dimension(_) => EXIT_VALIDATION,
                ParseError::Invalid(e) => core_exit_code(e),
            },
            CliError::Core(e) => core_exit_code(e),
            CliError::Verification(_) => EXIT_VERIFICATION,
        }
    }
}
