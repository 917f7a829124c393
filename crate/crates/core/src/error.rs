use thiserror::Error;

/// Errors raised by the numerical kernels and scenario builders.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed input: wrong dimensions, unknown labels, parameters out of range.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// Input is well formed but outside the mathematical domain of the operation
    /// (negative eigenvalues, non-normalized states, non-CPTP Choi matrices).
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested construction exceeds a hard size limit.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn argument<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
