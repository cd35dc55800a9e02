use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("measurement vector has zero energy")]
    ZeroSignal,
    #[error("reference image has zero energy")]
    ZeroReference,
    #[error("operation requires a {expected} operator")]
    Kind { expected: &'static str },
    #[error("gamma must be strictly positive, got {0}")]
    NonPositiveGamma(f64),
    #[error("{what} did not converge within {iterations} iterations")]
    Convergence {
        what: &'static str,
        iterations: usize,
    },
    #[error("filter {0} fails the orthonormality checks")]
    InvalidFilter(&'static str),
    #[error("parse error: {0}")]
    Parse(String),
}

macro_rules! dim_err {
    ($($arg:tt)*) => {
        $crate::error::Error::Dimension(alloc::format!($($arg)*))
    };
}
pub(crate) use dim_err;
