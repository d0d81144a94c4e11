use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("eigensolver did not converge after {sweeps} iterations (residual {residual:e})")]
    Convergence { sweeps: usize, residual: f64 },

    #[error("numerical consistency check failed: {0}")]
    Consistency(String),

    #[error("parameter outside the supported domain: {0}")]
    Domain(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: malformed data: {message}", path.display())]
    Format { path: PathBuf, message: String },
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) | Error::Domain(_) => 1,
            Error::Convergence { .. } | Error::Consistency(_) => 2,
            Error::Io { .. } | Error::Format { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
