use thiserror::Error;

use crate::config::ConfigError;

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_BLOWUP: i32 = 4;
pub const EXIT_MISSING: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] galerkin_lab::Error),
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self::Config(ConfigError {
            line: 0,
            message: message.into(),
        })
    }

    pub fn exit_code(&self) -> i32 {
        use galerkin_lab::Error as E;
        match self {
            Self::Config(_) | Self::Core(E::Config(_)) => EXIT_CONFIG,
            Self::Core(E::BlowUp { .. }) => EXIT_BLOWUP,
            Self::Core(E::MissingArtifact(_)) => EXIT_MISSING,
            _ => EXIT_FAILURE,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Core(e.into())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Core(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Core(e.into())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
