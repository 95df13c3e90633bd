//! Plain-text matrix format shared by every tool:
//!
//! ```text
//! n p
//! a11 a12 ... a1n
//! ...
//! an1 an2 ... ann
//! ```
//!
//! `p = 0` denotes an integer matrix; only then may entries be negative.
//! Modular entries must already lie in `[0, p)`.

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};

use super::field::PrimeField;
use super::matrix_fp::MatrixFp;
use super::matrix_z::MatrixZ;
use super::AlgebraError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatrixText {
    Integer(MatrixZ),
    Modular { modulus: BigUint, entries: MatrixZ },
}

impl MatrixText {
    pub fn parse(text: &str) -> Result<Self, AlgebraError> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| AlgebraError::Parse("missing `n p` header".into()))?;
        let mut parts = header.split_whitespace();
        let n: usize = parse_field(parts.next(), "n")?;
        let p: BigUint = parse_field(parts.next(), "p")?;
        if parts.next().is_some() {
            return Err(AlgebraError::Parse("header must be exactly `n p`".into()));
        }
        if n == 0 {
            return Err(AlgebraError::Parse("dimension must be positive".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        for row in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| AlgebraError::Parse(format!("missing row {}", row + 1)))?;
            let entries: Vec<&str> = line.split_whitespace().collect();
            if entries.len() != n {
                return Err(AlgebraError::Parse(format!(
                    "row {} has {} entries, expected {n}",
                    row + 1,
                    entries.len()
                )));
            }
            for e in entries {
                let v: BigInt = e
                    .parse()
                    .map_err(|_| AlgebraError::Parse(format!("bad entry `{e}`")))?;
                if !p.is_zero() {
                    if v.is_negative() {
                        return Err(AlgebraError::Parse(format!(
                            "negative entry `{e}` in a matrix mod {p}"
                        )));
                    }
                    if v.magnitude() >= &p {
                        return Err(AlgebraError::Parse(format!("entry `{e}` is not reduced mod {p}")));
                    }
                }
                data.push(v);
            }
        }
        if lines.next().is_some() {
            return Err(AlgebraError::Parse("trailing content after matrix".into()));
        }
        let entries = MatrixZ::from_fn(n, |i, j| data[i * n + j].clone());
        Ok(if p.is_zero() {
            MatrixText::Integer(entries)
        } else {
            MatrixText::Modular { modulus: p, entries }
        })
    }

    /// Interprets a modular matrix over `field`; the moduli must agree.
    pub fn into_fp<F: PrimeField>(self, field: &F) -> Result<MatrixFp<F>, AlgebraError> {
        match self {
            MatrixText::Modular { modulus, entries } if modulus == field.modulus() => {
                Ok(MatrixFp::reduce(&entries, field))
            }
            MatrixText::Modular { modulus, .. } => Err(AlgebraError::Parse(format!(
                "matrix is over F_{modulus}, expected F_{}",
                field.modulus()
            ))),
            MatrixText::Integer(_) => Err(AlgebraError::Parse(
                "expected a matrix mod p, found an integer matrix".into(),
            )),
        }
    }
}

fn parse_field<T: std::str::FromStr>(tok: Option<&str>, name: &str) -> Result<T, AlgebraError> {
    tok.ok_or_else(|| AlgebraError::Parse(format!("missing {name}")))?
        .parse()
        .map_err(|_| AlgebraError::Parse(format!("invalid {name}")))
}
