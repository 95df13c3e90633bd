//! Prime-field scalar arithmetic.
//!
//! Two backends share the [`PrimeField`] interface: [`Fp64`] keeps residues
//! in a single machine word and is used whenever `p < 2^63`; [`FpBig`] is the
//! arbitrary-precision fallback for larger moduli.

use std::fmt::Debug;
use std::hash::Hash;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::primes::{is_prime, is_prime_u64};
use super::AlgebraError;

/// A prime field `F_p`. The field value is the shared modulus context;
/// elements are plain residues that only make sense together with it.
#[allow(clippy::wrong_self_convention)]
pub trait PrimeField: Clone + Debug + PartialEq + Eq + Hash + Send + Sync + 'static {
    type Elem: Clone + Debug + PartialEq + Eq + Hash + Send + Sync;

    /// Builds the field for modulus `p`, rejecting composites and moduli the
    /// backend cannot represent.
    fn from_modulus(p: &BigUint) -> Result<Self, AlgebraError>;
    fn modulus(&self) -> BigUint;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_u64(&self, v: u64) -> Self::Elem;
    /// Reduces an arbitrary integer (including negatives) into `[0, p)`.
    fn from_bigint(&self, v: &BigInt) -> Self::Elem;
    fn to_biguint(&self, x: &Self::Elem) -> BigUint;

    fn add(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn sub(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn neg(&self, x: &Self::Elem) -> Self::Elem;
    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, x: &Self::Elem) -> bool;
    fn inv(&self, x: &Self::Elem) -> Result<Self::Elem, AlgebraError>;

    /// `sum x_i * y_i`. Backends may defer reduction to the end.
    fn dot<'a, I>(&self, pairs: I) -> Self::Elem
    where
        I: Iterator<Item = (&'a Self::Elem, &'a Self::Elem)>,
        Self::Elem: 'a,
    {
        pairs.fold(self.zero(), |acc, (x, y)| self.add(&acc, &self.mul(x, y)))
    }

    fn pow(&self, x: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut acc = self.one();
        let mut base = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

/// Word-sized prime field, `2 <= p < 2^63`.
///
/// Residues are stored canonically in `[0, p)`. Products go through `u128`;
/// dot products accumulate unreduced in `u128` and reduce once, which is
/// where matrix multiplication spends its time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp64 {
    p: u64,
}

impl Fp64 {
    pub const MAX_MODULUS_BITS: u32 = 63;

    pub fn new(p: u64) -> Result<Self, AlgebraError> {
        if p >= 1 << Self::MAX_MODULUS_BITS {
            return Err(AlgebraError::ModulusTooLarge(BigUint::from(p)));
        }
        if !is_prime_u64(p) {
            return Err(AlgebraError::NotPrime(BigUint::from(p)));
        }
        Ok(Fp64 { p })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn reduce_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }
}

impl PrimeField for Fp64 {
    type Elem = u64;

    fn from_modulus(p: &BigUint) -> Result<Self, AlgebraError> {
        match p.to_u64() {
            Some(small) => Fp64::new(small),
            None => Err(AlgebraError::ModulusTooLarge(p.clone())),
        }
    }

    fn modulus(&self) -> BigUint {
        BigUint::from(self.p)
    }

    #[inline]
    fn zero(&self) -> u64 {
        0
    }

    #[inline]
    fn one(&self) -> u64 {
        1 % self.p
    }

    #[inline]
    fn from_u64(&self, v: u64) -> u64 {
        v % self.p
    }

    fn from_bigint(&self, v: &BigInt) -> u64 {
        let m = BigInt::from(self.p);
        v.mod_floor(&m).to_u64().expect("residue fits in a word")
    }

    fn to_biguint(&self, x: &u64) -> BigUint {
        BigUint::from(*x)
    }

    #[inline]
    fn add(&self, x: &u64, y: &u64) -> u64 {
        // p < 2^63, so the sum cannot overflow
        let s = x + y;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    fn sub(&self, x: &u64, y: &u64) -> u64 {
        if x >= y {
            x - y
        } else {
            x + self.p - y
        }
    }

    #[inline]
    fn neg(&self, x: &u64) -> u64 {
        if *x == 0 {
            0
        } else {
            self.p - x
        }
    }

    #[inline]
    fn mul(&self, x: &u64, y: &u64) -> u64 {
        ((*x as u128 * *y as u128) % self.p as u128) as u64
    }

    #[inline]
    fn is_zero(&self, x: &u64) -> bool {
        *x == 0
    }

    fn inv(&self, x: &u64) -> Result<u64, AlgebraError> {
        if *x == 0 {
            return Err(AlgebraError::ZeroInverse);
        }
        // extended Euclid on (x, p)
        let (mut r0, mut r1) = (self.p as i128, *x as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(t0.rem_euclid(self.p as i128) as u64)
    }

    #[inline]
    fn dot<'a, I>(&self, pairs: I) -> u64
    where
        I: Iterator<Item = (&'a u64, &'a u64)>,
    {
        const LIMIT: u128 = 1 << 127;
        let p = self.p as u128;
        let mut acc: u128 = 0;
        for (x, y) in pairs {
            // each product is < 2^126
            acc += *x as u128 * *y as u128;
            if acc >= LIMIT {
                acc %= p;
            }
        }
        (acc % p) as u64
    }
}

/// Arbitrary-precision prime field for moduli beyond the word backend.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpBig {
    p: Arc<BigUint>,
}

impl FpBig {
    pub fn new(p: BigUint) -> Result<Self, AlgebraError> {
        if !is_prime(&p) {
            return Err(AlgebraError::NotPrime(p));
        }
        Ok(FpBig { p: Arc::new(p) })
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }
}

impl PrimeField for FpBig {
    type Elem = BigUint;

    fn from_modulus(p: &BigUint) -> Result<Self, AlgebraError> {
        FpBig::new(p.clone())
    }

    fn modulus(&self) -> BigUint {
        (*self.p).clone()
    }

    fn zero(&self) -> BigUint {
        BigUint::zero()
    }

    fn one(&self) -> BigUint {
        BigUint::one() % &*self.p
    }

    fn from_u64(&self, v: u64) -> BigUint {
        BigUint::from(v) % &*self.p
    }

    fn from_bigint(&self, v: &BigInt) -> BigUint {
        let m = BigInt::from_biguint(Sign::Plus, (*self.p).clone());
        v.mod_floor(&m).to_biguint().expect("non-negative residue")
    }

    fn to_biguint(&self, x: &BigUint) -> BigUint {
        x.clone()
    }

    fn add(&self, x: &BigUint, y: &BigUint) -> BigUint {
        let s = x + y;
        if s >= *self.p {
            s - &*self.p
        } else {
            s
        }
    }

    fn sub(&self, x: &BigUint, y: &BigUint) -> BigUint {
        if x >= y {
            x - y
        } else {
            x + &*self.p - y
        }
    }

    fn neg(&self, x: &BigUint) -> BigUint {
        if x.is_zero() {
            BigUint::zero()
        } else {
            &*self.p - x
        }
    }

    fn mul(&self, x: &BigUint, y: &BigUint) -> BigUint {
        (x * y) % &*self.p
    }

    fn is_zero(&self, x: &BigUint) -> bool {
        x.is_zero()
    }

    fn inv(&self, x: &BigUint) -> Result<BigUint, AlgebraError> {
        if x.is_zero() {
            return Err(AlgebraError::ZeroInverse);
        }
        let e = &*self.p - BigUint::from(2u32);
        Ok(x.modpow(&e, &self.p))
    }

    fn dot<'a, I>(&self, pairs: I) -> BigUint
    where
        I: Iterator<Item = (&'a BigUint, &'a BigUint)>,
    {
        let acc = pairs.fold(BigUint::zero(), |acc, (x, y)| acc + x * y);
        acc % &*self.p
    }
}
