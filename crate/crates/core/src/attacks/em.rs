//! The system `A^k1 B^l1 ... A^km B^lm = M` as `n^2` polynomial equations
//! in the `2m` exponents.
//!
//! `A = I + N` with `N` nilpotent, so `A^k = sum_{j<n} binom(k, j) N^j` and
//! each entry of `A^k` is a polynomial of degree below `n` in `k`. The
//! binomials need `j!` to be invertible, which holds because `p >= n`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::algebra::{Fp64, MatrixFp, PrimeField};
use crate::hasher::Step;
use crate::params::GeneratorSet;

use super::AttackError;

/// Sparse polynomial over `F_p`: exponent vector to nonzero coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, u64>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: u64) -> Self {
        let mut p = Poly::zero(nvars);
        if c != 0 {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], u64)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), *c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, f: &Fp64, exps: Vec<u32>, c: u64) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(slot) => {
                if c != 0 {
                    slot.insert(c);
                }
            }
            Entry::Occupied(mut slot) => {
                let sum = f.add(slot.get(), &c);
                if sum == 0 {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly, f: &Fp64) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(f, e.clone(), *c);
        }
        out
    }

    pub fn mul(&self, other: &Poly, f: &Fp64) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(f, e, f.mul(c1, c2));
            }
        }
        out
    }

    pub fn evaluate(&self, point: &[u64], f: &Fp64) -> u64 {
        self.terms.iter().fold(0, |acc, (e, c)| {
            let mono = e
                .iter()
                .zip(point)
                .fold(*c, |m, (&d, &x)| f.mul(&m, &f.pow(&f.from_u64(x), d as u64)));
            f.add(&acc, &mono)
        })
    }
}

/// Entrywise polynomials of `A^k` in a single variable `var` of `nvars`.
fn power_polys(m: &MatrixFp<Fp64>, var: usize, nvars: usize) -> Vec<Poly> {
    let f = *m.field();
    let n = m.n();
    let identity = MatrixFp::identity(&f, n);
    let nil = MatrixFp::from_fn(&f, n, |i, j| f.sub(m.get(i, j), &u64::from(i == j)));
    let mut out = vec![Poly::zero(nvars); n * n];
    let mut nil_power = identity;
    // falling factorial k (k-1) ... (k-j+1) / j!, as coefficients in k
    let mut falling = vec![1u64];
    let mut factorial = 1u64;
    for j in 0..n {
        let inv_fact = f.inv(&factorial).expect("j! is a unit since p >= n");
        for (idx, e) in nil_power.entries().iter().enumerate() {
            if *e == 0 {
                continue;
            }
            for (deg, c) in falling.iter().enumerate() {
                if *c == 0 {
                    continue;
                }
                let mut exps = vec![0; nvars];
                exps[var] = deg as u32;
                out[idx].add_term(&f, exps, f.mul(&f.mul(c, &inv_fact), e));
            }
        }
        // multiply the falling factorial by (k - j)
        let mut next = vec![0u64; falling.len() + 1];
        for (deg, c) in falling.iter().enumerate() {
            next[deg + 1] = f.add(&next[deg + 1], c);
            next[deg] = f.sub(&next[deg], &f.mul(c, &f.from_u64(j as u64)));
        }
        falling = next;
        factorial = f.mul(&factorial, &f.from_u64(j as u64 + 1));
        nil_power = &nil_power * &nil;
    }
    out
}

fn mat_mul(x: &[Poly], y: &[Poly], n: usize, f: &Fp64) -> Vec<Poly> {
    let nvars = x[0].nvars;
    (0..n * n)
        .map(|idx| {
            let (r, c) = (idx / n, idx % n);
            (0..n).fold(Poly::zero(nvars), |acc, k| acc.add(&x[r * n + k].mul(&y[k * n + c], f), f))
        })
        .collect()
}

/// The `n^2` equations `P_rc(k_1, l_1, ..., k_m, l_m) - M_rc = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmSystem {
    field: Fp64,
    n: usize,
    m: usize,
    target: MatrixFp<Fp64>,
    /// Entries of the product, before the target is subtracted.
    product: Vec<Poly>,
}

pub fn emit_em_system(m: usize, target: &MatrixFp<Fp64>, gens: &GeneratorSet<Fp64>) -> Result<EmSystem, AttackError> {
    if m == 0 {
        return Err(AttackError::EmptySystem);
    }
    let f = *gens.field();
    let n = gens.n();
    if target.n() != n || *target.field() != f {
        return Err(crate::algebra::AlgebraError::DimensionMismatch { left: n, right: target.n() }.into());
    }
    let nvars = 2 * m;
    let mut product: Vec<Poly> = (0..n * n).map(|i| Poly::constant(nvars, u64::from(i % (n + 1) == 0))).collect();
    for i in 0..m {
        product = mat_mul(&product, &power_polys(gens.step_matrix(Step::A), 2 * i, nvars), n, &f);
        product = mat_mul(&product, &power_polys(gens.step_matrix(Step::B), 2 * i + 1, nvars), n, &f);
    }
    Ok(EmSystem {
        field: f,
        n,
        m,
        target: target.clone(),
        product,
    })
}

impl EmSystem {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Left-hand side `P_rc - M_rc` of equation `(r, c)`.
    pub fn equation(&self, r: usize, c: usize) -> Poly {
        let t = self.target.get(r, c);
        self.product[r * self.n + c].add(&Poly::constant(2 * self.m, self.field.neg(t)), &self.field)
    }

    /// The product matrix at exponents `(k_1, l_1, ..., k_m, l_m)`.
    pub fn evaluate_product(&self, point: &[u64]) -> MatrixFp<Fp64> {
        assert_eq!(point.len(), 2 * self.m, "one value per unknown");
        let values: Vec<u64> = self.product.iter().map(|poly| poly.evaluate(point, &self.field)).collect();
        MatrixFp::from_fn(&self.field, self.n, |r, c| values[r * self.n + c])
    }

    /// Zero exactly at solutions.
    pub fn residual(&self, point: &[u64]) -> MatrixFp<Fp64> {
        let prod = self.evaluate_product(point);
        MatrixFp::from_fn(&self.field, self.n, |r, c| self.field.sub(prod.get(r, c), self.target.get(r, c)))
    }

    pub fn is_solution(&self, point: &[u64]) -> bool {
        self.residual(point).entries().iter().all(|e| *e == 0)
    }

    /// Text form, one equation per line:
    /// `r c : e_1,...,e_2m=coef e_1,...,e_2m=coef ...`, preceded by a header
    /// naming the modulus and the unknowns.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let vars: Vec<String> = (1..=self.m).flat_map(|i| [format!("k{i}"), format!("l{i}")]).collect();
        writeln!(out, "em n={} p={} m={}", self.n, self.field.p(), self.m).unwrap();
        writeln!(out, "vars {}", vars.join(" ")).unwrap();
        for r in 0..self.n {
            for c in 0..self.n {
                write!(out, "{r} {c} :").unwrap();
                for (e, coef) in self.equation(r, c).terms() {
                    let exps: Vec<String> = e.iter().map(u32::to_string).collect();
                    write!(out, " {}={coef}", exps.join(",")).unwrap();
                }
                out.push('\n');
            }
        }
        out
    }

    /// Reads the equations back; returns `(n, p, m, equations)` with the
    /// equations in row-major order.
    pub fn parse_text(text: &str) -> Result<(usize, u64, usize, Vec<Poly>), AttackError> {
        let err = |msg: String| AttackError::Parse(msg);
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| err("missing header".into()))?;
        let mut fields = BTreeMap::new();
        for kv in header.split_whitespace().skip(1) {
            let (k, v) = kv.split_once('=').ok_or_else(|| err(format!("bad header field `{kv}`")))?;
            let v: u64 = v.parse().map_err(|_| err(format!("bad header value `{kv}`")))?;
            fields.insert(k, v);
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| err(format!("header lacks {k}")));
        let (n, p, m) = (get("n")? as usize, get("p")?, get("m")? as usize);
        lines.next().filter(|l| l.starts_with("vars")).ok_or_else(|| err("missing vars line".into()))?;
        let mut eqs = vec![None; n * n];
        for line in lines {
            let (pos, terms) = line.split_once(':').ok_or_else(|| err(format!("bad line `{line}`")))?;
            let idx: Vec<usize> = pos
                .split_whitespace()
                .map(|s| s.parse().map_err(|_| err(format!("bad index in `{line}`"))))
                .collect::<Result<_, _>>()?;
            let [r, c] = idx[..] else { return Err(err(format!("bad index in `{line}`"))) };
            if r >= n || c >= n {
                return Err(err(format!("entry ({r}, {c}) out of range")));
            }
            let mut poly = Poly::zero(2 * m);
            for term in terms.split_whitespace() {
                let (e, coef) = term.split_once('=').ok_or_else(|| err(format!("bad term `{term}`")))?;
                let exps: Vec<u32> = e
                    .split(',')
                    .map(|x| x.parse().map_err(|_| err(format!("bad exponent in `{term}`"))))
                    .collect::<Result<_, _>>()?;
                if exps.len() != 2 * m {
                    return Err(err(format!("term `{term}` has {} exponents, expected {}", exps.len(), 2 * m)));
                }
                let coef: u64 = coef.parse().map_err(|_| err(format!("bad coefficient in `{term}`")))?;
                if coef == 0 || coef >= p {
                    return Err(err(format!("coefficient {coef} is not a nonzero residue")));
                }
                poly.terms.insert(exps, coef);
            }
            eqs[r * n + c] = Some(poly);
        }
        let eqs = eqs
            .into_iter()
            .enumerate()
            .map(|(i, e)| e.ok_or_else(|| err(format!("missing equation {} {}", i / n, i % n))))
            .collect::<Result<_, _>>()?;
        Ok((n, p, m, eqs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{build_generators, ParamSet};
    use proptest::prelude::*;

    fn gens(p: u64) -> GeneratorSet<Fp64> {
        build_generators(&ParamSet::concrete(p).unwrap()).unwrap()
    }

    #[test]
    fn power_polynomials_match_powers() {
        for p in [5u64, 11, 101] {
            let g = gens(p);
            for step in [Step::A, Step::B] {
                let polys = power_polys(g.step_matrix(step), 0, 1);
                for k in 0..=20u64 {
                    let direct = g.step_matrix(step).pow(k);
                    for (idx, poly) in polys.iter().enumerate() {
                        assert_eq!(poly.evaluate(&[k], g.field()), direct.entries()[idx], "p={p} k={k}");
                    }
                    assert!(polys.iter().all(|q| q.terms().all(|(e, _)| e[0] < 3)));
                }
            }
        }
    }

    #[test]
    fn identity_target_admits_zero() {
        let g = gens(11);
        let sys = emit_em_system(1, &MatrixFp::identity(g.field(), 3), &g).unwrap();
        assert!(sys.is_solution(&[0, 0]));
        assert!(!sys.is_solution(&[1, 0]));
        assert!(sys.is_solution(&[11 % 11, 0]));
        assert!(matches!(emit_em_system(0, &MatrixFp::identity(g.field(), 3), &g), Err(AttackError::EmptySystem)));
    }

    #[test]
    fn text_roundtrip() {
        let g = gens(11);
        let target = g.step_matrix(Step::B).clone();
        let sys = emit_em_system(2, &target, &g).unwrap();
        let text = sys.to_text();
        assert!(text.starts_with("em n=3 p=11 m=2\nvars k1 l1 k2 l2\n"));
        let (n, p, m, eqs) = EmSystem::parse_text(&text).unwrap();
        assert_eq!((n, p, m), (3, 11, 2));
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(eqs[r * 3 + c], sys.equation(r, c));
            }
        }
        // (k1, l1, k2, l2) = (0, 1, 0, 0) reaches B
        for eq in &eqs {
            assert_eq!(eq.evaluate(&[0, 1, 0, 0], g.field()), 0);
        }
        assert!(EmSystem::parse_text("em n=3 p=11 m=1\nvars k1 l1\n0 0 : 1,2,3=4\n").is_err());
    }

    proptest! {
        #[test]
        fn system_matches_products(m in 1usize..=3, raw in proptest::collection::vec(0u64..11, 6)) {
            let g = gens(11);
            let point = &raw[..2 * m];
            let sys = emit_em_system(m, &MatrixFp::identity(g.field(), 3), &g).unwrap();
            let pairs = point.chunks(2).map(|c| (c[0], c[1])).collect();
            let word = super::super::FactorizationWord::new(pairs);
            prop_assert_eq!(sys.evaluate_product(point), word.evaluate(&g));
        }
    }
}
