use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors split into two families: `Invalid*`/`Io`/`Parse` are rejected
/// inputs or configuration, the remaining variants are numerical failures
/// encountered on valid inputs. The CLI maps the first family to exit
/// code 2 and the second to exit code 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: row {row}, column '{column}': {message}")]
    Parse {
        path: PathBuf,
        /// 1-based data row (header excluded).
        row: usize,
        column: String,
        message: String,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("integration blew up at step {step} (|state| > {limit:e})")]
    Blowup { step: usize, limit: f64 },

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// Process exit code the CLI uses for this error: 2 for validation
    /// problems, 3 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::InvalidInput(_) | Error::Io { .. } | Error::Parse { .. } => 2,
            Error::Numerical(_) | Error::Blowup { .. } | Error::NonConvergence { .. } => 3,
        }
    }
}
