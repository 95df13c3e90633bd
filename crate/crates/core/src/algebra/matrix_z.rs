use std::fmt;
use std::ops::Mul;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use super::AlgebraError;

/// Square matrix over the integers. Entries are arbitrary precision: products
/// of `k` generators have entries up to `(n c)^k`, far past any machine word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatrixZ {
    n: usize,
    data: Vec<BigInt>,
}

impl MatrixZ {
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { BigInt::one() } else { BigInt::zero() })
    }

    pub fn zero(n: usize) -> Self {
        Self::from_fn(n, |_, _| BigInt::zero())
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        MatrixZ { n, data }
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix rows must be square");
        Self::from_fn(n, |i, j| BigInt::from(rows[i][j]))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.n + j]
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.n != other.n {
            return Err(AlgebraError::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let n = self.n;
        Ok(Self::from_fn(n, |i, j| {
            (0..n).fold(BigInt::zero(), |acc, k| {
                acc + &self.data[i * n + k] * &other.data[k * n + j]
            })
        }))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::identity(self.n);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Fraction-free (Bareiss) determinant.
    pub fn det(&self) -> BigInt {
        let n = self.n;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k * n + k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&r| !a[r * n + k].is_zero()) else {
                    return BigInt::zero();
                };
                for j in 0..n {
                    a.swap(k * n + j, swap * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                    a[i * n + j] = num / &prev;
                }
            }
            prev = a[k * n + k].clone();
        }
        sign * &a[n * n - 1]
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> MatrixZ {
        let n = self.n;
        let mut data = Vec::with_capacity((n - 1) * (n - 1));
        for i in (0..n).filter(|&i| i != skip_row) {
            for j in (0..n).filter(|&j| j != skip_col) {
                data.push(self.data[i * n + j].clone());
            }
        }
        MatrixZ { n: n - 1, data }
    }

    /// Exact inverse of a unimodular matrix (det = ±1) via the adjugate.
    pub fn inv(&self) -> Result<Self, AlgebraError> {
        let det = self.det();
        if !det.abs().is_one() {
            return Err(AlgebraError::Singular);
        }
        let n = self.n;
        if n == 1 {
            return Ok(MatrixZ {
                n,
                data: vec![det],
            });
        }
        Ok(Self::from_fn(n, |i, j| {
            let cof = self.minor(j, i).det();
            let signed = if (i + j) % 2 == 0 { cof } else { -cof };
            signed * &det
        }))
    }

    /// The constant `c` bounding every entry in absolute value.
    pub fn max_abs_entry(&self) -> BigUint {
        self.data
            .iter()
            .map(|e| e.magnitude().clone())
            .max()
            .unwrap_or_default()
    }
}

impl Mul for &MatrixZ {
    type Output = MatrixZ;

    fn mul(self, rhs: &MatrixZ) -> MatrixZ {
        self.try_mul(rhs).expect("dimension mismatch")
    }
}

impl fmt::Display for MatrixZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} 0", self.n)?;
        for row in self.data.chunks(self.n) {
            let line: Vec<String> = row.iter().map(|e| e.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}
