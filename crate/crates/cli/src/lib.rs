//! Command-line machinery: sweep specifications, figure presets, CSV
//! output and the verification suite.

pub mod output;
pub mod presets;
pub mod run;
pub mod spec;
pub mod verify;

use thiserror::Error;

/// Process-level error classes; each maps to a distinct exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, unknown names, malformed files (exit 1).
    #[error("{0}")]
    Usage(String),
    /// One or more verification checks failed (exit 2).
    #[error("verification failed: {failed} of {total} checks")]
    Verification { failed: usize, total: usize },
    /// Non-convergence or out-of-radius amplitudes (exit 3).
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Verification { .. } => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("i/o error: {e}"))
    }
}

impl From<charge_states::states::StateError> for CliError {
    fn from(e: charge_states::states::StateError) -> Self {
        use charge_states::states::StateError;
        match &e {
            StateError::OutOfRadius { .. }
            | StateError::Numerics(_)
            | StateError::VanishingNorm => CliError::Numeric(e.to_string()),
            StateError::ParityMismatch => CliError::Usage(e.to_string()),
        }
    }
}

impl From<charge_states::nonlinearity::ModelError> for CliError {
    fn from(e: charge_states::nonlinearity::ModelError) -> Self {
        CliError::Usage(e.to_string())
    }
}
