//! Exact linear algebra over Q and prime fields.

mod field;
mod matrix;

pub use field::{is_prime, Field, Fp, Q};
pub use matrix::{axpy, kernel_of_images, rank_of, Matrix, RowReduced, Span};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinAlgError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("cannot parse rational: {0}")]
    Parse(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("rows have different lengths")]
    Ragged,
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch { left: (usize, usize), right: (usize, usize) },
}
