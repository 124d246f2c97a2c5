use std::path::PathBuf;

/// Errors produced by the solver and the experiment harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("integrability error: {0}")]
    Integrability(String),

    #[error("non-integrable integrand: {0}")]
    NonIntegrable(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("matrix is not symmetric positive definite ({0})")]
    NotSpd(String),

    #[error("argument {x} exceeds the overflow guard {limit}")]
    Overflow { x: f64, limit: f64 },

    #[error("derivative order {requested} exceeds the recurrence cap {cap}")]
    DepthCap { requested: usize, cap: usize },

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
