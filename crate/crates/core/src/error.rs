use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group law: {0}")]
    InvalidLaw(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("product is not a lattice point (non-integral coordinate {coord})")]
    NonIntegral { coord: usize },
    #[error("dilation is not admissible; offending monomials: {0}")]
    Inadmissible(String),
    #[error("invalid dilation: {0}")]
    InvalidDilation(String),
    #[error("weight filtration: {0}")]
    Filtration(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("config error in field `{field}`: {msg}")]
    Config { field: String, msg: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
