use thiserror::Error;

/// Failures raised by the Gaussian-state engine and everything built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violated a documented precondition (range, dimension, index).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The arithmetic left the physical region: an unphysical covariance matrix,
    /// a non-positive conditional variance, an unpaired symplectic spectrum.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// An empirically checked precondition did not hold (e.g. a non-monotone
    /// key-rate profile handed to the threshold search).
    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn numerical(msg: impl Into<String>) -> Error {
    Error::Numerical(msg.into())
}
