use std::process::ExitCode;

use quadtrap::TrapError;
use thiserror::Error;

/// Command failure, carrying the stable process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Singularity(String),
    #[error("{0}")]
    NoConvergence(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Singularity(_) => 3,
            CliError::NoConvergence(_) => 4,
            CliError::Infeasible(_) => 5,
        })
    }
}

impl From<TrapError> for CliError {
    fn from(e: TrapError) -> Self {
        let msg = e.to_string();
        match e {
            TrapError::Singularity { .. } | TrapError::SingularGridPoint { .. } => {
                CliError::Singularity(msg)
            }
            TrapError::NoConvergence { .. } | TrapError::FitFailure { .. } => {
                CliError::NoConvergence(msg)
            }
            TrapError::Infeasible(_) => CliError::Infeasible(msg),
            TrapError::InvalidArgument(_)
            | TrapError::Domain(_)
            | TrapError::Degenerate(_)
            | TrapError::Asymmetry(_)
            | TrapError::InsufficientData(_)
            | TrapError::InvalidData(_) => CliError::Input(msg),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
