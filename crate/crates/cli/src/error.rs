use fdbia::error::SchemeError;
use fdbia::rate::RateError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or arguments.
    #[error("{0}")]
    Usage(String),
    /// Missing or invalid configuration.
    #[error("{0}")]
    Config(String),
    /// Numerical failure or I/O trouble while running.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl From<SchemeError> for CliError {
    fn from(e: SchemeError) -> Self {
        match e {
            SchemeError::DegenerateChannel(_) | SchemeError::Linalg(_) => CliError::Runtime(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<RateError> for CliError {
    fn from(e: RateError) -> Self {
        match e {
            RateError::InvalidScenario(_) => CliError::Config(e.to_string()),
            RateError::Scheme(s) => s.into(),
        }
    }
}
