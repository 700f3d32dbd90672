use geophase::PhaseError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(#[from] PhaseError),
    #[error("output error: {0}")]
    Output(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    /// Process exit code: 1 config, 2 numerical, 3 verification.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Output(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}
