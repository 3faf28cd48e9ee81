use thiserror::Error;

use crate::subset::Subset;

/// Errors raised by the representability library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate: almost-surely-one coordinate, infinite union mass for {0}")]
    Degenerate(Subset),

    #[error("inconsistent zero pattern: configuration {config:#b} has probability {value:e}")]
    InconsistentZeroPattern { config: u32, value: f64 },

    #[error("inversion hypothesis violated: P(X({0}) = 0) is zero")]
    InversionHypothesis(Subset),

    #[error("invalid zero pattern: {0}")]
    InvalidPattern(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("ground sets differ: {left} vs {right}")]
    GroundMismatch { left: usize, right: usize },

    #[error("cancellation failure: level {level} did not stabilise below {bits} bits")]
    CancellationFailure { level: usize, bits: usize },

    #[error("not representable: {0}")]
    NotRepresentable(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
