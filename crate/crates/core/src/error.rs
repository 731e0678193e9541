//! Error types shared across the simulator.

use thiserror::Error;

/// Errors raised by matrix operations, state constructors, and evolution loops.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A precondition on an argument was violated (bad label, out-of-range
    /// parameter, non-Hermitian input, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two operands had incompatible dimensions.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An iterative numerical routine failed to converge; carries the
    /// residual it stalled at.
    #[error("numerical failure in {context}: residual {residual:.3e}")]
    NumericalFailure { context: String, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }
}
