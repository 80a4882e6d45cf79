use alloc::string::String;

use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("basis size (s+r)!/(s!r!) overflows for s={s}, r={r}")]
    SizeOverflow { s: usize, r: usize },
    #[error("index {index} out of range (size {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is numerically singular (elimination step {step})")]
    Singular { step: usize },
    #[error("dense size {rows}x{cols} exceeds the cap of {cap} entries")]
    DenseCapExceeded { rows: usize, cols: usize, cap: usize },
    #[error("iteration did not converge after {iterations} steps")]
    NoConvergence { iterations: usize },
    #[error("point is a pole of the Möbius map")]
    Pole,
}

pub type Result<T> = core::result::Result<T, Error>;
