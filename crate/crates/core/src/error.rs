use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("out of domain: {0}")]
    OutOfDomain(String),
    #[error("capacity exceeded: {what} requires n <= {limit}, got {got}")]
    Capacity {
        what: &'static str,
        limit: usize,
        got: usize,
    },
    #[error("witness never detects the noisy state (omega_k = {omega_k} >= 1)")]
    NoDetection { omega_k: f64 },
    #[error("shift by {shift} makes omega_{index} negative")]
    InfeasibleShift { index: usize, shift: f64 },
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn out_of_domain(msg: impl Into<String>) -> Error {
    Error::OutOfDomain(msg.into())
}
