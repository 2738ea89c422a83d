use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("format error: {0}")]
    Format(String),

    #[error("invalid value: {0}")]
    Value(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch: {0}")]
    Dim(String),

    #[error("solver did not converge: {0}")]
    Convergence(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("invalid density: {0}")]
    Density(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("index out of range: {0}")]
    Index(String),
}

pub type Result<T> = std::result::Result<T, Error>;
