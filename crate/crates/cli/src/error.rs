use std::path::PathBuf;

use thiserror::Error;

/// Failure of a CLI invocation; each variant maps to one exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("{0}")]
    Numeric(mipd_core::Error),

    #[error("check {name} failed: max deviation {deviation:.3e} exceeds {tolerance:.3e}")]
    CheckFailed { name: &'static str, deviation: f64, tolerance: f64 },

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numeric(_) | CliError::CheckFailed { .. } => 2,
            CliError::Io { .. } => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

impl From<mipd_core::Error> for CliError {
    fn from(e: mipd_core::Error) -> Self {
        use mipd_core::Error as E;
        match e {
            E::InvalidParam { .. } | E::NeedsFiniteSteps | E::TooLarge { .. } => CliError::Usage(e.to_string()),
            other => CliError::Numeric(other),
        }
    }
}
