use thiserror::Error;

/// Errors raised by the field, matrix, share and protocol layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),

    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("target exponent {0} is not in the support")]
    TargetNotInSupport(u64),

    #[error("evaluation points must be distinct and nonzero")]
    InvalidPoints,

    #[error("dimension {dim} is not divisible into {parts} parts")]
    IndivisibleDimensions { dim: usize, parts: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("shape mismatch: expected {expected:?}, got {actual:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("no region of the worker-count formula matched (s={s}, t={t}, z={z}): {detail}")]
    RegionDispatch {
        s: u64,
        t: u64,
        z: u64,
        detail: String,
    },

    #[error("could not find evaluation points after {0} draws")]
    SetupExhausted(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
