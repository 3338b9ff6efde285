use std::fmt;

use thiserror::Error;

/// Which side of the game a message refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Robot {
    Pursuer,
    Evader,
}

impl fmt::Display for Robot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Robot::Pursuer => f.write_str("pursuer"),
            Robot::Evader => f.write_str("evader"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Every boundary branch and the stay-put fallback are blocked.
    #[error("{robot} is trapped: all branches and the stay-put position are blocked")]
    RobotTrapped { robot: Robot },

    #[error("{robot} is trapped at step {step}: all branches and the stay-put position are blocked")]
    RobotTrappedAtStep { robot: Robot, step: usize },

    #[error("node budget of {budget} evaluations exceeded")]
    NodeBudgetExceeded { budget: u64 },

    #[error("invalid scenario: {}", .0.join("; "))]
    InvalidScenario(Vec<String>),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
