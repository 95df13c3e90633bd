use std::fmt;
use std::ops::Mul;

use num_bigint::BigUint;

use super::field::{Fp64, PrimeField};
use super::matrix_z::MatrixZ;
use super::AlgebraError;

/// Square matrix over a prime field, entries stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatrixFp<F: PrimeField = Fp64> {
    field: F,
    n: usize,
    data: Vec<F::Elem>,
}

impl<F: PrimeField> MatrixFp<F> {
    pub fn identity(field: &F, n: usize) -> Self {
        Self::from_fn(field, n, |i, j| if i == j { field.one() } else { field.zero() })
    }

    pub fn zero(field: &F, n: usize) -> Self {
        Self::from_fn(field, n, |_, _| field.zero())
    }

    pub fn from_fn(field: &F, n: usize, mut f: impl FnMut(usize, usize) -> F::Elem) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        MatrixFp {
            field: field.clone(),
            n,
            data,
        }
    }

    /// Builds a matrix from row-major residues; values are reduced mod p.
    pub fn from_u64_rows(field: &F, rows: &[&[u64]]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix rows must be square");
        Self::from_fn(field, n, |i, j| field.from_u64(rows[i][j]))
    }

    /// Canonical projection of an integer matrix.
    pub fn reduce(m: &MatrixZ, field: &F) -> Self {
        Self::from_fn(field, m.n(), |i, j| field.from_bigint(m.get(i, j)))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn field(&self) -> &F {
        &self.field
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &F::Elem {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F::Elem) {
        self.data[i * self.n + j] = v;
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[F::Elem] {
        &self.data
    }

    pub fn to_biguint_rows(&self) -> Vec<Vec<BigUint>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.field.to_biguint(self.get(i, j))).collect())
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        let (zero, one) = (self.field.zero(), self.field.one());
        (0..self.n).all(|i| (0..self.n).all(|j| *self.get(i, j) == if i == j { one.clone() } else { zero.clone() }))
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.field, self.n, |i, j| self.get(j, i).clone())
    }

    fn check_dims(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.n != other.n {
            return Err(AlgebraError::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_dims(other)?;
        let n = self.n;
        Ok(Self::from_fn(&self.field, n, |i, j| {
            self.field
                .dot((0..n).map(|k| (&self.data[i * n + k], &other.data[k * n + j])))
        }))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_dims(other)?;
        Ok(Self::from_fn(&self.field, self.n, |i, j| {
            self.field.add(self.get(i, j), other.get(i, j))
        }))
    }

    /// `self <- self * rhs`, reusing one row of scratch space.
    pub fn mul_assign_right(&mut self, rhs: &Self) {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut row = Vec::with_capacity(n);
        for i in 0..n {
            row.clear();
            let lhs_row = &self.data[i * n..(i + 1) * n];
            for j in 0..n {
                row.push(
                    self.field
                        .dot(lhs_row.iter().zip((0..n).map(|k| &rhs.data[k * n + j]))),
                );
            }
            self.data[i * n..(i + 1) * n].clone_from_slice(&row);
        }
    }

    /// Binary exponentiation; `M^0 = I`.
    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::identity(&self.field, self.n);
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

    /// Determinant by Gaussian elimination.
    pub fn det(&self) -> F::Elem {
        let f = &self.field;
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = f.one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !f.is_zero(&a[r * n + col])) else {
                return f.zero();
            };
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                }
                det = f.neg(&det);
            }
            let pv = a[col * n + col].clone();
            det = f.mul(&det, &pv);
            let pinv = f.inv(&pv).expect("pivot is nonzero");
            for r in col + 1..n {
                let factor = f.mul(&a[r * n + col], &pinv);
                if f.is_zero(&factor) {
                    continue;
                }
                for j in col..n {
                    let t = f.mul(&factor, &a[col * n + j]);
                    a[r * n + j] = f.sub(&a[r * n + j], &t);
                }
            }
        }
        det
    }

    /// Gauss-Jordan inverse.
    pub fn inv(&self) -> Result<Self, AlgebraError> {
        let f = &self.field;
        let n = self.n;
        let mut a = self.data.clone();
        let mut b = Self::identity(f, n).data;
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !f.is_zero(&a[r * n + col]))
                .ok_or(AlgebraError::Singular)?;
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                    b.swap(pivot * n + j, col * n + j);
                }
            }
            let pinv = f.inv(&a[col * n + col])?;
            for j in 0..n {
                a[col * n + j] = f.mul(&a[col * n + j], &pinv);
                b[col * n + j] = f.mul(&b[col * n + j], &pinv);
            }
            for r in 0..n {
                if r == col || f.is_zero(&a[r * n + col]) {
                    continue;
                }
                let factor = a[r * n + col].clone();
                for j in 0..n {
                    let ta = f.mul(&factor, &a[col * n + j]);
                    a[r * n + j] = f.sub(&a[r * n + j], &ta);
                    let tb = f.mul(&factor, &b[col * n + j]);
                    b[r * n + j] = f.sub(&b[r * n + j], &tb);
                }
            }
        }
        Ok(MatrixFp {
            field: f.clone(),
            n,
            data: b,
        })
    }
}

impl MatrixFp<Fp64> {
    /// Canonical residues as rows, for the word backend.
    pub fn to_u64_rows(&self) -> Vec<Vec<u64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }
}

impl<F: PrimeField> Mul for &MatrixFp<F> {
    type Output = MatrixFp<F>;

    /// Panics on dimension mismatch; use [`MatrixFp::try_mul`] to handle it.
    fn mul(self, rhs: &MatrixFp<F>) -> MatrixFp<F> {
        self.try_mul(rhs).expect("dimension mismatch")
    }
}

impl<F: PrimeField> fmt::Display for MatrixFp<F> {
    /// The shared matrix text format: `n p` then one line per row.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.n, self.field.modulus())?;
        for row in self.to_biguint_rows() {
            let line: Vec<String> = row.iter().map(|e| e.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(p: u64) -> Fp64 {
        Fp64::new(p).unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let fp = f(11);
        let m = MatrixFp::from_u64_rows(&fp, &[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]]);
        let i = MatrixFp::identity(&fp, 3);
        assert_eq!(&i * &m, m);
        assert_eq!(&m * &i, m);
        assert_eq!(m.pow(0), i);
    }

    #[test]
    fn dimension_mismatch() {
        let fp = f(5);
        let a = MatrixFp::identity(&fp, 3);
        let b = MatrixFp::identity(&fp, 4);
        assert!(matches!(
            a.try_mul(&b),
            Err(AlgebraError::DimensionMismatch { left: 3, right: 4 })
        ));
    }

    #[test]
    fn det_examples() {
        let fp = f(5);
        assert_eq!(MatrixFp::identity(&fp, 3).det(), 1);
        let d = MatrixFp::from_u64_rows(&fp, &[&[2, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(d.det(), 2);
    }

    #[test]
    fn singular_inverse() {
        let fp = f(7);
        assert!(matches!(MatrixFp::zero(&fp, 3).inv(), Err(AlgebraError::Singular)));
        assert_eq!(MatrixFp::identity(&fp, 3).inv().unwrap(), MatrixFp::identity(&fp, 3));
    }

    #[test]
    fn unipotent_has_order_p() {
        for p in [3u64, 5, 7, 11, 13] {
            let fp = f(p);
            let a = MatrixFp::from_u64_rows(&fp, &[&[1, 4, 0], &[0, 1, 4], &[0, 0, 1]]).pow(4);
            assert!(a.pow(p).is_identity());
            assert!((1..p).all(|j| !a.pow(j).is_identity()));
        }
    }

    fn arb_matrix(p: u64) -> impl Strategy<Value = MatrixFp<Fp64>> {
        proptest::collection::vec(0..p, 9)
            .prop_map(move |v| MatrixFp::from_fn(&f(p), 3, |i, j| v[i * 3 + j]))
    }

    proptest! {
        #[test]
        fn mul_is_associative(a in arb_matrix(13), b in arb_matrix(13), c in arb_matrix(13)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }

        #[test]
        fn inverse_roundtrip(a in arb_matrix(13)) {
            if let Ok(ai) = a.inv() {
                prop_assert!((&a * &ai).is_identity());
                prop_assert!((&ai * &a).is_identity());
            } else {
                prop_assert_eq!(a.det(), 0);
            }
        }

        #[test]
        fn pow_is_additive(a in arb_matrix(11), i in 0u64..=64, j in 0u64..=64) {
            prop_assert_eq!(a.pow(i + j), &a.pow(i) * &a.pow(j));
        }

        #[test]
        fn det_is_multiplicative(a in arb_matrix(7), b in arb_matrix(7)) {
            let fp = f(7);
            prop_assert_eq!((&a * &b).det(), fp.mul(&a.det(), &b.det()));
        }

        #[test]
        fn in_place_product_matches(a in arb_matrix(13), b in arb_matrix(13)) {
            let mut c = a.clone();
            c.mul_assign_right(&b);
            prop_assert_eq!(c, &a * &b);
        }
    }
}
