use std::path::PathBuf;

use selfsim_core::GeomError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("{0}")]
    Numerical(GeomError),

    #[error("nothing to export: {0}")]
    EmptyOutput(String),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for anything the caller can fix in the invocation or the job file,
    /// 3 for failures inside the numerics.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Schema { .. } | CliError::Io { .. } => 2,
            CliError::Numerical(GeomError::InvalidArgument(_)) => 2,
            CliError::Numerical(_) | CliError::EmptyOutput(_) => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

impl From<GeomError> for CliError {
    fn from(e: GeomError) -> Self {
        CliError::Numerical(e)
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
