use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("type (g,n)=({g},{n}) is unstable: 2g-2+n must be positive")]
    UnstableType { g: u32, n: u32 },
    #[error("at most 62 marks are supported, got {0}")]
    TooManyMarks(u32),
    #[error("{elem} is not an element of the stability domain of type ({g},{n})")]
    NotInDomain { elem: String, g: u32, n: u32 },
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("characteristic mismatch: {0} vs {1}")]
    ChiMismatch(i64, i64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("not a V-function: {0}")]
    InvalidVFunction(String),
    #[error("not a witness: {0}")]
    InvalidWitness(String),
    #[error("search budget of {0} nodes exceeded")]
    BudgetExceeded(u64),
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
