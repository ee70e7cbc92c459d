use std::io;
use std::path::PathBuf;

use sapd_core::{ModelError, OracleError, SolveError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Validation(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("oracle refused: {0}")]
    Budget(String),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Read { .. } | CliError::Write { .. } => 1,
            CliError::Parse(_) | CliError::Validation(_) => 2,
            CliError::Unsupported(_) => 3,
            CliError::Budget(_) => 4,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::NotFlat => CliError::Unsupported(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Unsupported(m) => CliError::Unsupported(m),
            SolveError::Model(m) => m.into(),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            OracleError::Model(m) => m.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}
