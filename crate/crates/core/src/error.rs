use thiserror::Error;

/// Errors raised by the rearrangement toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("invalid integrand: {0}")]
    InvalidIntegrand(String),

    #[error("query out of table range: {0}")]
    OutOfRange(String),

    #[error("arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("solver diverged: {0}")]
    Divergence(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
