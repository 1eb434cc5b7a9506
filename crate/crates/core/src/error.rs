use thiserror::Error;

/// Errors raised by the library. Every variant names the invariant that was violated.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max |m - m^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("entry count {found} does not match shape {rows}x{cols}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        found: usize,
    },

    #[error("dimension {0} is too small (need d >= 2)")]
    DimensionTooSmall(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operation requires d = {expected}, got d = {found}")]
    WrongDimension { expected: usize, found: usize },

    #[error("dimension {0} is not prime")]
    NonPrimeDimension(usize),

    #[error("coefficient c[{k},{l}] = {value} is negative")]
    NegativeCoefficient { k: usize, l: usize, value: f64 },

    #[error("coefficients sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    #[error("invalid Bloch matrix: {0}")]
    InvalidBloch(String),

    #[error("invalid subgroup: {0}")]
    InvalidSubgroup(String),

    #[error("invalid sampler configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
