use thiserror::Error;

/// Errors raised by the optimizers, objectives and statistics routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A caller broke an operation's precondition (invalid candidate, bad temperature, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A configuration value is out of range or inconsistent with the problem.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid dimension: expected at least {min}, got {got}")]
    InvalidDimension { min: usize, got: usize },

    #[error("invalid size: expected at least {min}, got {got}")]
    InvalidSize { min: usize, got: usize },

    #[error("unsupported search space: {0}")]
    UnsupportedSpace(String),

    /// Statistics input that admits no meaningful answer (empty sample, zero variance).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
