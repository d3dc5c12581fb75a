use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    /// TOML syntax or schema error; the message carries line and column.
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid config: `{key}` {message}")]
    Invalid { key: String, message: String },
    #[error(transparent)]
    Core(#[from] dmlpg::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("could not build thread pool: {0}")]
    Threads(String),
}

impl CliError {
    pub fn invalid(key: &str, message: impl Into<String>) -> Self {
        CliError::Invalid { key: key.to_string(), message: message.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}
