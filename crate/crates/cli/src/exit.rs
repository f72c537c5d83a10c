use std::fmt;
use std::process::ExitCode;

use hankel_core::Error;

/// Failures mapped onto the exit codes 1 (verification), 2 (config) and
/// 3 (truncation order too small).
#[derive(Debug)]
pub enum CliError {
    Verification(String),
    Config(String),
    Order(String),
}

impl CliError {
    pub fn code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Verification(_) => 1,
            CliError::Config(_) => 2,
            CliError::Order(_) => 3,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Order(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InsufficientOrder { .. } => CliError::Order(e.to_string()),
            Error::ParityDefect { .. } => CliError::Verification(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}
