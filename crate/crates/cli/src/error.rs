use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum JobError {
    /// A precondition of the configuration does not hold; nothing was computed.
    #[error("validation failed: {0}")]
    Validation(String),
    /// Construction or analysis broke down numerically.
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl JobError {
    pub fn exit_code(&self) -> i32 {
        match self {
            JobError::Validation(_) => 2,
            JobError::Numerical(_) => 3,
            JobError::Io { .. } => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        JobError::Io { path: path.into(), source }
    }
}

pub fn validation(msg: impl Into<String>) -> JobError {
    JobError::Validation(msg.into())
}

pub fn numerical(msg: impl std::fmt::Display) -> JobError {
    JobError::Numerical(msg.to_string())
}
