//! Exact arithmetic: prime fields, matrices over `F_p` and over `Z`.

mod field;
mod matrix_fp;
mod matrix_z;
pub mod primes;
mod text;

use num_bigint::BigUint;
use thiserror::Error;

pub use field::{Fp64, FpBig, PrimeField};
pub use matrix_fp::MatrixFp;
pub use matrix_z::MatrixZ;
pub use text::MatrixText;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("dimension mismatch: {left}x{left} vs {right}x{right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("{0} is not prime")]
    NotPrime(BigUint),
    #[error("modulus {0} is too large for this backend")]
    ModulusTooLarge(BigUint),
    #[error("matrix parse error: {0}")]
    Parse(String),
}
