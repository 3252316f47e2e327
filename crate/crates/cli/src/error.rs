use std::path::PathBuf;

use thiserror::Error;

/// CLI failures, grouped by the exit code they map to.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("missing input: {0}")]
    Dependency(String),

    #[error("{0}")]
    Runtime(String),

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Runtime(_) | CliError::Write { .. } => 1,
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Dependency(_) => 4,
        }
    }

    pub fn write(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Write {
            path: path.into(),
            source,
        }
    }
}

impl From<varqual_core::Error> for CliError {
    fn from(e: varqual_core::Error) -> Self {
        use varqual_core::Error as E;
        match e {
            E::InvalidConfig(_) | E::NonFinite { .. } | E::InsufficientData { .. } | E::Domain(_) => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
