use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("zero polynomial rejected: {0}")]
    ZeroPolynomial(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("convergence not certified: {0}")]
    Convergence(String),

    #[error("precision insufficient: {0}")]
    Precision(String),

    #[error("construction infeasible: {0}")]
    Infeasible(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("search cap exceeded: {0}")]
    CapExceeded(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
