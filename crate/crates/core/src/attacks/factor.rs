use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::algebra::{MatrixFp, PrimeField};
use crate::hasher::{hash_trits, step_sequence, AttributionTable, Step, WalkState};
use crate::params::GeneratorSet;

use super::AttackError;

/// `A^k1 B^l1 ... A^km B^lm` with every exponent in `[0, p)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FactorizationWord {
    pub pairs: Vec<(u64, u64)>,
}

impl FactorizationWord {
    pub fn new(pairs: Vec<(u64, u64)>) -> Self {
        FactorizationWord { pairs }
    }

    pub fn m(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `sum (k_i + l_i)`.
    pub fn weight(&self) -> u128 {
        self.pairs.iter().map(|&(k, l)| k as u128 + l as u128).sum()
    }

    pub fn evaluate<F: PrimeField>(&self, gens: &GeneratorSet<F>) -> MatrixFp<F> {
        let (a, b) = (gens.step_matrix(Step::A), gens.step_matrix(Step::B));
        let mut acc = MatrixFp::identity(gens.field(), gens.n());
        for &(k, l) in &self.pairs {
            if k > 0 {
                acc.mul_assign_right(&a.pow(k));
            }
            if l > 0 {
                acc.mul_assign_right(&b.pow(l));
            }
        }
        acc
    }

    /// The positive step word `A^k1 B^l1 ...` spelled out letter by letter.
    pub fn to_steps(&self) -> Vec<Step> {
        let mut out = Vec::new();
        for &(k, l) in &self.pairs {
            out.extend(std::iter::repeat_n(Step::A, k as usize));
            out.extend(std::iter::repeat_n(Step::B, l as usize));
        }
        out
    }

    /// Normal form of a step word in the free product `Z_p * Z_p`: free
    /// reduction, then merging of equal letters with exponents taken mod
    /// `p`, dropping blocks that vanish. Empty exactly when the word is a
    /// consequence of `A^p = B^p = I` alone.
    pub fn from_steps(steps: &[Step], p: u64) -> Self {
        let mut blocks: Vec<(bool, u64)> = Vec::new();
        for s in free_reduce(steps) {
            let e = if s.exponent() > 0 { 1 % p } else { p - 1 };
            match blocks.last_mut() {
                Some((is_a, acc)) if *is_a == s.is_a() => {
                    *acc = (*acc + e) % p;
                    if *acc == 0 {
                        blocks.pop();
                    }
                }
                _ if e != 0 => blocks.push((s.is_a(), e)),
                _ => {}
            }
        }
        let mut pairs = Vec::new();
        let mut iter = blocks.into_iter().peekable();
        while let Some((is_a, e)) = iter.next() {
            if is_a {
                let l = match iter.peek() {
                    Some(&(false, l)) => {
                        iter.next();
                        l
                    }
                    _ => 0,
                };
                pairs.push((e, l));
            } else {
                pairs.push((0, e));
            }
        }
        FactorizationWord { pairs }
    }
}

impl fmt::Display for FactorizationWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, l) in &self.pairs {
            writeln!(f, "{k} {l}")?;
        }
        Ok(())
    }
}

/// One `k l` pair per line; blank lines and `#` comments are skipped.
impl FromStr for FactorizationWord {
    type Err = AttackError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut pairs = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let nums: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<u64>()
                    .map_err(|e| AttackError::Parse(format!("line {}: `{s}`: {e}", no + 1)))
            };
            match nums.as_slice() {
                [k, l] => pairs.push((parse(k)?, parse(l)?)),
                _ => {
                    return Err(AttackError::Parse(format!(
                        "line {}: expected two exponents, got `{line}`",
                        no + 1
                    )))
                }
            }
        }
        Ok(FactorizationWord { pairs })
    }
}

/// True iff the alternating product equals `target`.
pub fn verify_factorization<F: PrimeField>(w: &FactorizationWord, target: &MatrixFp<F>, gens: &GeneratorSet<F>) -> bool {
    target.n() == gens.n() && target.field() == gens.field() && w.evaluate(gens) == *target
}

/// Bounds `C1 log p <= weight <= C2 log p` separating meaningful solutions
/// from the trivial ones built out of `A^p = I`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NontrivialityWindow {
    pub c1: f64,
    pub c2: f64,
}

impl NontrivialityWindow {
    pub fn new(c1: f64, c2: f64) -> Result<Self, AttackError> {
        if !(c1 > 0.0 && c1 <= c2 && c2.is_finite()) {
            return Err(AttackError::InvalidWindow(format!("need 0 < C1 <= C2, got C1 = {c1}, C2 = {c2}")));
        }
        Ok(NontrivialityWindow { c1, c2 })
    }

    /// `C1 = 1 / ln(n c)` from the girth bound, `C2 = 10 C1`.
    pub fn from_girth_bound(n: usize, c: &BigUint) -> Self {
        let c1 = 1.0 / ln_big(&(BigUint::from(n) * c));
        NontrivialityWindow { c1, c2: 10.0 * c1 }
    }
}

pub(crate) fn ln_big(v: &BigUint) -> f64 {
    let shift = v.bits().saturating_sub(64);
    (v >> shift).to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn is_nontrivial(w: &FactorizationWord, p: &BigUint, window: &NontrivialityWindow) -> bool {
    let ln_p = ln_big(p);
    let weight = w.weight() as f64;
    weight > 0.0 && window.c1 * ln_p <= weight && weight <= window.c2 * ln_p
}

/// Cancels adjacent `S S^-1` pairs.
pub fn free_reduce(steps: &[Step]) -> Vec<Step> {
    let mut out: Vec<Step> = Vec::with_capacity(steps.len());
    for &s in steps {
        if out.last() == Some(&s.inverse()) {
            out.pop();
        } else {
            out.push(s);
        }
    }
    out
}

fn modulus_u64<F: PrimeField>(gens: &GeneratorSet<F>) -> u64 {
    // exponents beyond 2^64 are never produced by a walk
    gens.field().modulus().to_u64().unwrap_or(u64::MAX)
}

/// `phi(x) phi(y)^-1 = I` written as a factorization of the identity.
pub fn collision_to_relator<F: PrimeField>(
    x: &[u8],
    y: &[u8],
    table: &AttributionTable,
    gens: &GeneratorSet<F>,
) -> Result<FactorizationWord, AttackError> {
    if x == y {
        return Err(AttackError::NotACollision("the two inputs are identical".into()));
    }
    if hash_trits(x, table, gens)? != hash_trits(y, table, gens)? {
        return Err(AttackError::NotACollision("digests differ".into()));
    }
    let mut word = step_sequence(x, table, None)?;
    word.extend(step_sequence(y, table, None)?.iter().rev().map(|s| s.inverse()));
    Ok(FactorizationWord::from_steps(&word, modulus_u64(gens)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Collision {
    pub x: Vec<u8>,
    pub y: Vec<u8>,
    pub relator: FactorizationWord,
    pub inputs_hashed: u64,
}

/// Hashes all trit strings in order of length and reports the first pair
/// of distinct inputs with equal digests whose relator does not collapse
/// in `Z_p * Z_p`. `None` once `budget` inputs have been hashed.
pub fn birthday_search<F: PrimeField>(
    gens: &GeneratorSet<F>,
    table: &AttributionTable,
    budget: u64,
) -> Result<Option<Collision>, AttackError> {
    let mut seen: HashMap<MatrixFp<F>, Vec<u8>> = HashMap::new();
    let mut level: Vec<(Vec<u8>, WalkState<F>)> = vec![(Vec::new(), WalkState::new(gens))];
    seen.insert(MatrixFp::identity(gens.field(), gens.n()), Vec::new());
    let mut hashed = 1u64;
    while !level.is_empty() {
        let mut next = Vec::with_capacity(level.len() * 3);
        for (trits, state) in &level {
            for t in 1..=3u8 {
                if hashed >= budget {
                    return Ok(None);
                }
                let state = state.clone().step(t, table, gens)?;
                let mut x = trits.clone();
                x.push(t);
                hashed += 1;
                match seen.get(state.matrix()) {
                    Some(y) => {
                        let relator = collision_to_relator(&x, y, table, gens)?;
                        if !relator.is_empty() {
                            return Ok(Some(Collision {
                                x,
                                y: y.clone(),
                                relator,
                                inputs_hashed: hashed,
                            }));
                        }
                    }
                    None => {
                        seen.insert(state.matrix().clone(), x.clone());
                    }
                }
                next.push((x, state));
            }
        }
        level = next;
    }
    Ok(None)
}
