use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("n = {n} exceeds the dense limit of {limit} qubits")]
    TooManyQubits { n: usize, limit: usize },
    #[error("state is not normalized: norm^2 = {0}")]
    NotNormalized(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("purity estimate {0} is not positive; dataset too small")]
    DatasetTooSmall(f64),
    #[error("G is undefined at (0, 0)")]
    GDomain,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

pub(crate) fn guard(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        Err(Error::TooManyQubits { n, limit })
    } else {
        Ok(())
    }
}
