use thiserror::Error;

/// Errors raised by the symbolic engine and the numeric calculators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("evaluation error: {0}")]
    Eval(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("forms live in different bases; convert first")]
    MixedBasis,
    #[error("operation requires an exact frame inverse, but this frame only carries a first-order inverse")]
    InexactInverse,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no convergence after {iterations} iterations (bracket [{lo}, {hi}])")]
    NoConvergence { iterations: usize, lo: f64, hi: f64 },
    #[error("unknown derivation target `{0}`")]
    UnknownTarget(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
