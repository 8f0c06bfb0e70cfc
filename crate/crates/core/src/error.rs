use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NonPrimeModulus(u64),
    #[error("malformed scalar literal: {0}")]
    MalformedScalar(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("basis size {dim} exceeds budget {budget}")]
    BudgetExceeded { dim: u128, budget: usize },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("unknown builtin triple: {0}")]
    UnknownBuiltin(String),
    #[error("unknown suite: {0}")]
    UnknownSuite(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("subspace is not contained in the claimed ambient space")]
    NotASubspace,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
