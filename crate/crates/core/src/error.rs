use thiserror::Error;

/// Errors raised by ring construction, enumeration and the evaluators.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NonPrime(u64),
    #[error("invalid ring parameters: {0}")]
    InvalidSpec(String),
    #[error("subring degree {ell} does not divide extension degree {m}")]
    InvalidSubring { ell: usize, m: usize },
    #[error("element is not a unit")]
    NotAUnit,
    #[error("enumeration of {requested} items exceeds budget {budget}")]
    BudgetExceeded { requested: u128, budget: u128 },
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("span of the generators is not free")]
    NotFree,
    #[error("generators span a free module of rank {rank}, expected {expected}")]
    RankMismatch { rank: usize, expected: usize },
    #[error("code has no nonzero codeword")]
    EmptyCode,
    #[error("rate yields rank {0} < 1")]
    DegenerateRate(i64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
