use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("config: {0}")]
    Invalid(String),
    #[error("table: {0}")]
    Table(String),
    #[error(transparent)]
    Numerical(#[from] su11_core::Error),
    /// A single-point evaluation or reference check failed.
    #[error("{0}")]
    Evaluation(String),
}

impl CliError {
    pub(crate) fn at(line: usize, message: impl Into<String>) -> Self {
        CliError::Config {
            line,
            message: message.into(),
        }
    }

    /// Process exit status: 2 for numerical failures, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical(_) | CliError::Evaluation(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
