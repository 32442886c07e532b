use std::path::PathBuf;

use thiserror::Error;

/// Failure of a command, classified by exit code.
#[derive(Debug, Error)]
pub enum LabError {
    /// Bad invocation or configuration (exit 2).
    #[error("{0}")]
    Config(String),
    #[error("cannot read {}: {source}", path.display())]
    ConfigFile {
        path: PathBuf,
        source: std::io::Error,
    },
    /// Run-directory contents that are missing, truncated or inconsistent
    /// (exit 3).
    #[error("corrupt run data in {}: {reason}", path.display())]
    Corrupt { path: PathBuf, reason: String },
    /// Numerical failure of the pipeline (exit 1; exit 2 for domains the
    /// grid cannot resolve).
    #[error(transparent)]
    Numeric(#[from] ringlab_core::Error),
    #[error("cannot write {}: {source}", path.display())]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl LabError {
    pub fn exit_code(&self) -> u8 {
        match self {
            LabError::Config(_) | LabError::ConfigFile { .. } => 2,
            // the configuration describes a domain the solver cannot take
            LabError::Numeric(
                ringlab_core::Error::InvalidDomain { .. } | ringlab_core::Error::Resolution { .. },
            ) => 2,
            LabError::Corrupt { .. } => 3,
            LabError::Numeric(_) | LabError::Write { .. } => 1,
        }
    }

    pub fn corrupt(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        LabError::Corrupt {
            path: path.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
