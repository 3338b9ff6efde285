use std::io;
use std::path::PathBuf;

use crate::scenario_file::ParseError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{source_name}: {error}")]
    Parse { source_name: String, error: ParseError },

    #[error(transparent)]
    Core(#[from] pursuit_core::Error),

    #[error("{path}: {error}")]
    Io { path: PathBuf, error: io::Error },

    #[error("{0}")]
    Usage(String),

    #[error("{failed} of {total} batch runs failed")]
    BatchFailed { failed: usize, total: usize, code: i32 },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, error: io::Error) -> Self {
        CliError::Io { path: path.into(), error }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                pursuit_core::Error::RobotTrapped { .. } | pursuit_core::Error::RobotTrappedAtStep { .. } => 3,
                pursuit_core::Error::NodeBudgetExceeded { .. } => 5,
                _ => 2,
            },
            CliError::Io { .. } => 4,
            CliError::BatchFailed { code, .. } => *code,
        }
    }

    /// Extra advice printed after the message.
    pub fn hint(&self) -> Option<&'static str> {
        match self {
            CliError::Core(pursuit_core::Error::NodeBudgetExceeded { .. }) => Some(
                "try a smaller --n-max or a larger delta_alpha, or raise PURSUIT_NODE_BUDGET",
            ),
            _ => None,
        }
    }
}
