//! Error type shared by all library operations.

use thiserror::Error;

/// Errors produced by contract and domain violations across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A multi-index or point does not match the dimension of the space.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A parameter is outside its admissible range.
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: String,
    },

    /// A weight sequence violates the positivity or monotonicity requirements.
    #[error("invalid weight sequence: {0}")]
    InvalidWeights(String),

    /// A computation produced a non-finite value.
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    /// The kernel series cannot be truncated to the requested tolerance
    /// within the supported number of terms.
    #[error(
        "kernel truncation for coordinate {coordinate} needs more than {limit} terms \
         to reach the requested tolerance"
    )]
    TruncationLimit { coordinate: usize, limit: usize },
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
