use std::io;
use std::path::PathBuf;

/// Failures surfaced by the command-line front end.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] hetnet_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 2 for invalid input, 3 when a numerical routine
    /// misses its tolerance, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Model(hetnet_core::Error::Parameter { .. }) => 2,
            CliError::Model(hetnet_core::Error::NonConvergence { .. }) => 3,
            CliError::Model(_) | CliError::Io { .. } | CliError::Csv(_) => 1,
        }
    }
}
