use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parity error: {0}")]
    Parity(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("lottery weights sum to {0}, expected exactly 1")]
    Normalization(String),

    #[error("invalid message for agent {agent}: {reason}")]
    Validation { agent: usize, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("strategy undefined at history {history}")]
    Simulation { history: String },

    #[error("beliefs undefined at unreachable information set: {0}")]
    BeliefUndefined(String),

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

impl Error {
    /// Exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvariantViolation(_) => 1,
            _ => 2,
        }
    }
}
