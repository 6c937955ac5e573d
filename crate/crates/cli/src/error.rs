use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Parse(String),

    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => exit::VALIDATION,
            CliError::Io { .. } => exit::IO,
            CliError::Parse(_) => exit::PARSE,
            CliError::Numerical(_) => exit::CONVERGENCE,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<ebb::Error> for CliError {
    fn from(e: ebb::Error) -> Self {
        match e {
            ebb::Error::InvalidInput(m) | ebb::Error::Domain(m) => CliError::Validation(m),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

pub mod exit {
    pub const SUCCESS: i32 = 0;
    /// Bad flag values or parameters (clap usage errors share this code).
    pub const VALIDATION: i32 = 2;
    pub const IO: i32 = 3;
    pub const PARSE: i32 = 4;
    /// A fit, series or quadrature failed to converge.
    pub const CONVERGENCE: i32 = 5;
}

pub type Result<T> = std::result::Result<T, CliError>;
