use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or invalid configuration; the message names the field.
    #[error("config error: {0}")]
    Config(String),

    #[error("every sweep point failed ({0} rows)")]
    AllPointsFailed(usize),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// Process exit code: 1 config, 2 all points failed, 3 I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::AllPointsFailed(_) => 2,
            CliError::Io { .. } => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<hstn_core::Error> for CliError {
    fn from(e: hstn_core::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
