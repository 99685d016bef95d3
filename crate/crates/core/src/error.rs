use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} agents, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("resource guard: {what} would require {count} items (cap {cap})")]
    Resource { what: String, count: u128, cap: u128 },

    #[error("convergence budget exhausted after {rounds} rounds (diameter {diameter:e} above {threshold:e})")]
    ConvergenceBudget {
        rounds: usize,
        diameter: f64,
        threshold: f64,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("transition failed in round {round} at agent {agent}: {message}")]
    Transition {
        round: usize,
        agent: usize,
        message: String,
    },

    #[error("internal consistency error: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Dimension { .. }
            | Error::Argument(_)
            | Error::Validation(_)
            | Error::Parse { .. }
            | Error::Contract(_) => 2,
            Error::Resource { .. } => 3,
            Error::ConvergenceBudget { .. } => 4,
            Error::Transition { .. } | Error::Internal(_) => 1,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}
