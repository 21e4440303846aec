use thiserror::Error;

/// Errors reported by grid construction, solvers, and the game engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain shape: {0}")]
    InvalidShape(String),

    #[error("invalid game parameters: {0}")]
    InvalidParams(String),

    #[error("grid/parameter mismatch: {0}")]
    GridMismatch(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
