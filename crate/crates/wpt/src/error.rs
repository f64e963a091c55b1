use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("sampling error: {0}")]
    Sampling(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("grid error: {0}")]
    Grid(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("verification error: {0}")]
    Verify(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
