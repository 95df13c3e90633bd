//! Parameter validation and construction of the step matrices.
//!
//! The integer generators are the unipotent matrices with `a` on the
//! superdiagonal and `b` on the subdiagonal, raised to the power `ell`.
//! Admissible `(n, a, b, ell)` obey a congruence rule that depends on
//! whether `n = 3` or `n >= 4`; see [`validate_params`].

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::algebra::primes::{is_prime, prime_divisors};
use crate::algebra::{AlgebraError, MatrixFp, MatrixZ, PrimeField};
use crate::analysis::group::{closure_size, group_order, ClosureSize};
use crate::hasher::Step;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error("dimension n = {n} is below the minimum of 3")]
    DimensionTooSmall { n: usize },
    #[error("{name} = {value} must be at least {min}")]
    OutOfRange { name: &'static str, value: u64, min: u64 },
    #[error("p = {0} is not prime")]
    NotPrime(BigUint),
    #[error("congruence violated: {constraint} (got {value})")]
    CongruenceViolated { constraint: String, value: u64 },
    #[error("ell = {ell} is not of the form {form}")]
    EllFormViolated { ell: u64, form: String },
    #[error("ell = {ell} is below the minimum 3(n-1) = {min}")]
    EllTooSmall { ell: u64, min: u64 },
    #[error("p = {p} is smaller than n = {n}")]
    PTooSmall { p: BigUint, n: usize },
    #[error("generator {which} reduces to the identity mod p")]
    DegenerateGenerators { which: Step },
    #[error("generator matrix is not in SL_n(Z): {0}")]
    NotSpecialLinear(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A validated parameter set `(n, p, a, b, ell)`.
///
/// `q` is the witness prime for `n >= 4` and `k` the exponent witness:
/// `ell = 4^k` when `n = 3`, `ell = q^(k+1) + 1` otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParamSet {
    n: usize,
    p: BigUint,
    a: u64,
    b: u64,
    ell: u64,
    q: Option<u64>,
    k: u32,
}

impl ParamSet {
    /// The concrete family `a = 4, b = 2, ell = 4` in dimension 3.
    pub fn concrete(p: u64) -> Result<Self, ParamError> {
        validate_params(3, &BigUint::from(p), 4, 2, 4)
    }

    /// Skips every admissibility check. Meant for experiments on parameter
    /// sets the hash itself would reject (e.g. tiny primes).
    pub fn unchecked(n: usize, p: BigUint, a: u64, b: u64, ell: u64) -> Self {
        ParamSet { n, p, a, b, ell, q: None, k: 0 }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn q(&self) -> Option<u64> {
        self.q
    }

    pub fn k(&self) -> u32 {
        self.k
    }
}

/// If `value = base^e` for some `e >= 1`, returns `e`.
fn exact_log(value: u64, base: u64) -> Option<u32> {
    if base < 2 || value < base {
        return None;
    }
    let mut v = value;
    let mut e = 0;
    while v.is_multiple_of(base) {
        v /= base;
        e += 1;
    }
    (v == 1).then_some(e)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn validate_params(n: usize, p: &BigUint, a: u64, b: u64, ell: u64) -> Result<ParamSet, ParamError> {
    if n < 3 {
        return Err(ParamError::DimensionTooSmall { n });
    }
    for (name, value) in [("a", a), ("b", b), ("ell", ell)] {
        if value < 2 {
            return Err(ParamError::OutOfRange { name, value, min: 2 });
        }
    }
    if !is_prime(p) {
        return Err(ParamError::NotPrime(p.clone()));
    }

    let (q, k) = if n == 3 {
        if a % 3 != 1 {
            return Err(ParamError::CongruenceViolated {
                constraint: "a ≡ 1 (mod 3)".into(),
                value: a,
            });
        }
        if b % 3 != 2 {
            return Err(ParamError::CongruenceViolated {
                constraint: "b ≡ -1 (mod 3)".into(),
                value: b,
            });
        }
        let k = exact_log(ell, 4).ok_or_else(|| ParamError::EllFormViolated {
            ell,
            form: "4^k with k >= 1".into(),
        })?;
        (None, k)
    } else {
        let n64 = n as u64;
        let g = gcd(gcd(n64 - 1, a - 1), b - 1);
        let candidates = prime_divisors(g);
        if candidates.is_empty() {
            return Err(ParamError::CongruenceViolated {
                constraint: "n ≡ a ≡ b ≡ 1 (mod q) for some prime q".into(),
                value: g,
            });
        }
        let min = 3 * (n64 - 1);
        if ell < min {
            return Err(ParamError::EllTooSmall { ell, min });
        }
        // smallest q admitting ell - 1 = q^(k+1), k >= 0
        let witness = candidates
            .iter()
            .find_map(|&q| exact_log(ell - 1, q).map(|e| (q, e - 1)));
        let (q, k) = witness.ok_or_else(|| ParamError::EllFormViolated {
            ell,
            form: format!(
                "q^(k+1) + 1 for a prime q in {:?} dividing gcd(n-1, a-1, b-1)",
                candidates
            ),
        })?;
        (Some(q), k)
    };

    if *p < BigUint::from(n) {
        return Err(ParamError::PTooSmall { p: p.clone(), n });
    }

    let ps = ParamSet { n, p: p.clone(), a, b, ell, q, k };
    let (a_z, b_z) = integer_generators(&ps);
    for (which, m) in [(Step::A, &a_z), (Step::B, &b_z)] {
        if reduces_to_identity(m, p) {
            return Err(ParamError::DegenerateGenerators { which });
        }
    }
    Ok(ps)
}

fn reduces_to_identity(m: &MatrixZ, p: &BigUint) -> bool {
    let p = BigInt::from(p.clone());
    let n = m.n();
    (0..n).all(|i| {
        (0..n).all(|j| {
            let r = ((m.get(i, j) % &p) + &p) % &p;
            let expected = if i == j { BigInt::one() % &p } else { BigInt::from(0) };
            r == expected
        })
    })
}

/// Unipotent matrix with `a` on the superdiagonal.
pub fn upper_generator(n: usize, a: u64) -> MatrixZ {
    MatrixZ::from_fn(n, |i, j| match j.checked_sub(i) {
        Some(0) => BigInt::one(),
        Some(1) => BigInt::from(a),
        _ => BigInt::from(0),
    })
}

/// Unipotent matrix with `b` on the subdiagonal.
pub fn lower_generator(n: usize, b: u64) -> MatrixZ {
    MatrixZ::from_fn(n, |i, j| match i.checked_sub(j) {
        Some(0) => BigInt::one(),
        Some(1) => BigInt::from(b),
        _ => BigInt::from(0),
    })
}

fn integer_generators(ps: &ParamSet) -> (MatrixZ, MatrixZ) {
    (
        upper_generator(ps.n, ps.a).pow(ps.ell),
        lower_generator(ps.n, ps.b).pow(ps.ell),
    )
}

/// The four step matrices over `Z` and over `F_p`, indexed by [`Step`].
#[derive(Clone, Debug)]
pub struct GeneratorSet<F: PrimeField> {
    params: ParamSet,
    field: F,
    over_z: [MatrixZ; 4],
    over_fp: [MatrixFp<F>; 4],
    entry_bound: BigUint,
}

pub fn build_generators<F: PrimeField>(ps: &ParamSet) -> Result<GeneratorSet<F>, ParamError> {
    let (a, b) = integer_generators(ps);
    let gens = GeneratorSet::from_integer_matrices(ps.clone(), a, b)?;
    for which in [Step::A, Step::B] {
        if gens.step_matrix(which).is_identity() {
            return Err(ParamError::DegenerateGenerators { which });
        }
    }
    Ok(gens)
}

impl<F: PrimeField> GeneratorSet<F> {
    /// Builds a generator set from arbitrary `A, B` in `SL_n(Z)`, with no
    /// degeneracy checks. `params` supplies `n` and `p`.
    pub fn from_integer_matrices(params: ParamSet, a: MatrixZ, b: MatrixZ) -> Result<Self, ParamError> {
        let field = F::from_modulus(&params.p)?;
        for (name, m) in [("A", &a), ("B", &b)] {
            if m.n() != params.n {
                return Err(ParamError::NotSpecialLinear(format!(
                    "{name} is {0}x{0}, expected n = {1}",
                    m.n(),
                    params.n
                )));
            }
            if m.det() != BigInt::one() {
                return Err(ParamError::NotSpecialLinear(format!("det {name} = {}", m.det())));
            }
        }
        let a_inv = a.inv()?;
        let b_inv = b.inv()?;
        let over_z = [a, b, a_inv, b_inv];
        let over_fp = [0, 1, 2, 3].map(|i| MatrixFp::reduce(&over_z[i], &field));
        let entry_bound = over_z.iter().map(MatrixZ::max_abs_entry).max().unwrap_or_default();
        Ok(GeneratorSet {
            params,
            field,
            over_z,
            over_fp,
            entry_bound,
        })
    }

    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    #[inline]
    pub fn step_matrix(&self, s: Step) -> &MatrixFp<F> {
        &self.over_fp[s.index()]
    }

    pub fn integer_step_matrix(&self, s: Step) -> &MatrixZ {
        &self.over_z[s.index()]
    }

    /// `c`: the largest absolute entry over the four integer step matrices.
    pub fn entry_bound(&self) -> &BigUint {
        &self.entry_bound
    }

    /// Conjugates every step matrix by `c`: `M -> C M C^-1`. The integer
    /// matrices are kept, so only the mod-p side changes.
    pub fn conjugated(&self, c: &MatrixFp<F>) -> Result<Self, AlgebraError> {
        let c_inv = c.inv()?;
        let mut out = self.clone();
        for m in out.over_fp.iter_mut() {
            *m = &(c * &*m) * &c_inv;
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenerationOutcome {
    Generates,
    GeneratesSubgroupOfOrder(u64),
    BudgetExceeded,
}

/// Closure of `{A^±1, B^±1}` from the identity, compared against
/// `|SL_n(F_p)|`. Gives up once more than `max_elements` are discovered.
pub fn check_generation<F: PrimeField>(gens: &GeneratorSet<F>, max_elements: u64) -> GenerationOutcome {
    match closure_size(gens, max_elements) {
        ClosureSize::Exceeded => GenerationOutcome::BudgetExceeded,
        ClosureSize::Complete(m) => {
            if group_order(gens.n(), gens.params.p()).to_u64() == Some(m) {
                GenerationOutcome::Generates
            } else {
                GenerationOutcome::GeneratesSubgroupOfOrder(m)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Fp64;

    fn big(p: u64) -> BigUint {
        BigUint::from(p)
    }

    #[test]
    fn concrete_family_is_valid() {
        let ps = validate_params(3, &big(11), 4, 2, 4).unwrap();
        assert_eq!(ps.k(), 1);
        assert_eq!(ps.q(), None);
        assert_eq!(validate_params(3, &big(11), 4, 2, 16).unwrap().k(), 2);
    }

    #[test]
    fn congruence_violation_names_the_rule() {
        let err = validate_params(3, &big(11), 5, 2, 4).unwrap_err();
        match err {
            ParamError::CongruenceViolated { constraint, value } => {
                assert!(constraint.contains("a ≡ 1 (mod 3)"));
                assert_eq!(value, 5);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            validate_params(3, &big(11), 4, 3, 4),
            Err(ParamError::CongruenceViolated { .. })
        ));
    }

    /// Direct evaluation of the admissibility predicate for n >= 4.
    fn predicate_n_ge_4(n: u64, a: u64, b: u64, ell: u64) -> Option<(u64, u32)> {
        for q in (2..=n.max(a).max(b)).filter(|&q| crate::algebra::primes::is_prime_u64(q)) {
            if n % q == 1 % q && a % q == 1 % q && b % q == 1 % q && ell >= 3 * (n - 1) {
                let mut pw = q;
                for k in 0..40u32 {
                    if pw + 1 == ell {
                        return Some((q, k));
                    }
                    pw = match pw.checked_mul(q) {
                        Some(v) => v,
                        None => break,
                    };
                }
            }
        }
        None
    }

    #[test]
    fn higher_dimension_witness() {
        let ps = validate_params(4, &big(11), 4, 4, 10).unwrap();
        assert_eq!((ps.q(), ps.k()), (Some(3), 1));
        assert_eq!(predicate_n_ge_4(4, 4, 4, 10), Some((3, 1)));
    }

    #[test]
    fn higher_dimension_matches_predicate() {
        for n in 4u64..=7 {
            for a in 2u64..=13 {
                for b in [2u64, 4, 5, 7, 13] {
                    for ell in 2u64..=30 {
                        let got = validate_params(n as usize, &big(101), a, b, ell)
                            .ok()
                            .map(|ps| (ps.q().unwrap(), ps.k()));
                        assert_eq!(got, predicate_n_ge_4(n, a, b, ell), "n={n} a={a} b={b} ell={ell}");
                    }
                }
            }
        }
    }

    #[test]
    fn error_kinds() {
        assert!(matches!(validate_params(3, &big(15), 4, 2, 4), Err(ParamError::NotPrime(_))));
        assert!(matches!(validate_params(3, &big(11), 4, 2, 8), Err(ParamError::EllFormViolated { .. })));
        assert!(matches!(validate_params(4, &big(11), 4, 4, 4), Err(ParamError::EllTooSmall { .. })));
        assert!(matches!(validate_params(4, &big(11), 4, 4, 12), Err(ParamError::EllFormViolated { .. })));
        assert!(matches!(validate_params(4, &big(11), 2, 4, 10), Err(ParamError::CongruenceViolated { .. })));
        assert!(matches!(validate_params(3, &big(2), 4, 2, 4), Err(ParamError::PTooSmall { .. })));
        assert!(matches!(validate_params(2, &big(11), 4, 2, 4), Err(ParamError::DimensionTooSmall { .. })));
        // a = 7 ≡ 1 (mod 3) but 7 ≡ 0 (mod 7): A collapses to I over F_7
        assert!(matches!(
            validate_params(3, &big(7), 7, 2, 4),
            Err(ParamError::DegenerateGenerators { which: Step::A })
        ));
    }

    #[test]
    fn concrete_generators() {
        let gens = build_generators::<Fp64>(&ParamSet::concrete(11).unwrap()).unwrap();
        assert_eq!(
            *gens.integer_step_matrix(Step::A),
            MatrixZ::from_i64_rows(&[&[1, 16, 96], &[0, 1, 16], &[0, 0, 1]])
        );
        assert_eq!(
            *gens.integer_step_matrix(Step::B),
            MatrixZ::from_i64_rows(&[&[1, 0, 0], &[8, 1, 0], &[24, 8, 1]])
        );
        assert_eq!(*gens.entry_bound(), big(160));
        for s in Step::ALL {
            assert_eq!(gens.step_matrix(s).det(), 1);
            assert_eq!(gens.integer_step_matrix(s).det(), BigInt::one());
            assert_eq!(*gens.step_matrix(s), MatrixFp::reduce(gens.integer_step_matrix(s), gens.field()));
        }
        for (i, s) in Step::ALL.iter().enumerate() {
            assert!(!gens.step_matrix(*s).is_identity());
            for t in &Step::ALL[i + 1..] {
                assert_ne!(gens.step_matrix(*s), gens.step_matrix(*t));
            }
        }
    }

    #[test]
    fn degenerate_mod_two() {
        let ps = ParamSet::unchecked(3, big(2), 4, 2, 4);
        assert!(matches!(
            build_generators::<Fp64>(&ps),
            Err(ParamError::DegenerateGenerators { which: Step::A })
        ));
    }

    #[test]
    fn generation_checks() {
        let gens = build_generators::<Fp64>(&ParamSet::concrete(3).unwrap()).unwrap();
        assert_eq!(check_generation(&gens, 10_000), GenerationOutcome::Generates);
        assert_eq!(check_generation(&gens, 100), GenerationOutcome::BudgetExceeded);

        let trivial = GeneratorSet::<Fp64>::from_integer_matrices(
            ParamSet::unchecked(3, big(3), 4, 2, 4),
            MatrixZ::identity(3),
            MatrixZ::identity(3),
        )
        .unwrap();
        assert_eq!(check_generation(&trivial, 10), GenerationOutcome::GeneratesSubgroupOfOrder(1));

        let large = build_generators::<Fp64>(&ParamSet::concrete(1_000_003).unwrap()).unwrap();
        assert_eq!(check_generation(&large, 1000), GenerationOutcome::BudgetExceeded);
    }

    #[test]
    fn valid_sets_have_distinct_nontrivial_steps() {
        for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 101] {
            for (a, b, ell) in [(4, 2, 4), (7, 5, 4), (4, 2, 16), (10, 8, 4)] {
                let Ok(ps) = validate_params(3, &big(p), a, b, ell) else { continue };
                let gens = build_generators::<Fp64>(&ps).unwrap();
                for (i, s) in Step::ALL.iter().enumerate() {
                    assert!(!gens.step_matrix(*s).is_identity());
                    for t in &Step::ALL[i + 1..] {
                        assert_ne!(gens.step_matrix(*s), gens.step_matrix(*t), "p={p}");
                    }
                }
            }
        }
    }
}
