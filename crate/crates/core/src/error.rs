use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("operands live on different universes (sizes {left} and {right})")]
    UniverseMismatch { left: usize, right: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("exact search infeasible: {items} residual items exceed the exact-search limit of {limit}")]
    ExactSearchInfeasible { items: usize, limit: usize },

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("solver error: {0}")]
    Solver(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
