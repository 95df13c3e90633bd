//! The palindromic-attack experiment: conjugating the generators into
//! symmetric matrices, the map `rho(M) = A M A + B M B`, and the power-entry
//! obstruction.
//!
//! `C A C^-1` is symmetric iff `S A = A^T S` for `S = C^T C`, which is the
//! test used throughout.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::algebra::{AlgebraError, Fp64, MatrixFp, PrimeField};
use crate::hasher::Step;
use crate::params::GeneratorSet;

use super::AttackError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetrizerMode {
    /// Scan every matrix: the identity first, then lexicographic order.
    Exhaustive,
    /// Solve `S A = A^T S`, `S B = B^T S` for symmetric `S` and factor
    /// `S = C^T C`. Heuristic.
    Bilinear,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetrizerResult {
    pub c: MatrixFp<Fp64>,
    pub a_hat: MatrixFp<Fp64>,
    pub b_hat: MatrixFp<Fp64>,
    pub mode: SymmetrizerMode,
    pub candidates_tried: u128,
    pub matches_found: u64,
}

/// Dense `n x n` helpers on row-major residues, used by the scans.
struct Flat {
    n: usize,
    p: u64,
}

impl Flat {
    fn mul(&self, x: &[u64], y: &[u64], out: &mut [u64]) {
        let n = self.n;
        for r in 0..n {
            for c in 0..n {
                let mut acc = 0u128;
                for k in 0..n {
                    acc += x[r * n + k] as u128 * y[k * n + c] as u128;
                }
                out[r * n + c] = (acc % self.p as u128) as u64;
            }
        }
    }

    fn gram(&self, c: &[u64], out: &mut [u64]) {
        // C^T C
        let n = self.n;
        for r in 0..n {
            for s in 0..n {
                let mut acc = 0u128;
                for k in 0..n {
                    acc += c[k * n + r] as u128 * c[k * n + s] as u128;
                }
                out[r * n + s] = (acc % self.p as u128) as u64;
            }
        }
    }

    fn decode(&self, mut code: u64, out: &mut [u64]) {
        for slot in out.iter_mut().rev() {
            *slot = code % self.p;
            code /= self.p;
        }
    }

    fn det(&self, m: &[u64], scratch: &mut Vec<u64>) -> u64 {
        let (n, p) = (self.n, self.p);
        let f = Fp64::new(p).expect("prime modulus");
        if n == 3 {
            let t = |a: u64, b: u64| a as u128 * b as u128 % p as u128;
            let minor = |i: usize, j: usize, k: usize, l: usize| (t(m[i], m[l]) + p as u128 - t(m[j], m[k])) as u64 % p;
            let d = t(m[0], minor(4, 5, 7, 8)) + t(p - m[1], minor(3, 5, 6, 8)) + t(m[2], minor(3, 4, 6, 7));
            return (d % p as u128) as u64;
        }
        scratch.clear();
        scratch.extend_from_slice(m);
        let mut det = 1u64;
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| scratch[r * n + col] != 0) else { return 0 };
            if pivot != col {
                for k in 0..n {
                    scratch.swap(pivot * n + k, col * n + k);
                }
                det = f.neg(&det);
            }
            let pv = scratch[col * n + col];
            det = f.mul(&det, &pv);
            let inv = f.inv(&pv).expect("nonzero pivot");
            for r in col + 1..n {
                let factor = f.mul(&scratch[r * n + col], &inv);
                if factor == 0 {
                    continue;
                }
                for k in col..n {
                    let sub = f.mul(&factor, &scratch[col * n + k]);
                    scratch[r * n + k] = f.sub(&scratch[r * n + k], &sub);
                }
            }
        }
        det
    }
}

struct Criterion {
    flat: Flat,
    a: Vec<u64>,
    b: Vec<u64>,
    at: Vec<u64>,
    bt: Vec<u64>,
}

struct Scratch {
    c: Vec<u64>,
    s: Vec<u64>,
    left: Vec<u64>,
    right: Vec<u64>,
    det: Vec<u64>,
}

impl Criterion {
    fn new(gens: &GeneratorSet<Fp64>) -> Self {
        let a = gens.step_matrix(Step::A);
        let b = gens.step_matrix(Step::B);
        Criterion {
            flat: Flat {
                n: gens.n(),
                p: gens.field().p(),
            },
            a: a.entries().to_vec(),
            b: b.entries().to_vec(),
            at: a.transpose().entries().to_vec(),
            bt: b.transpose().entries().to_vec(),
        }
    }

    fn scratch(&self) -> Scratch {
        let nn = self.flat.n * self.flat.n;
        Scratch {
            c: vec![0; nn],
            s: vec![0; nn],
            left: vec![0; nn],
            right: vec![0; nn],
            det: Vec::with_capacity(nn),
        }
    }

    /// Whether `C` in `scratch.c` makes both conjugates symmetric; the
    /// determinant is not checked.
    fn symmetrizes(&self, w: &mut Scratch) -> bool {
        self.flat.gram(&w.c, &mut w.s);
        for (m, mt) in [(&self.a, &self.at), (&self.b, &self.bt)] {
            self.flat.mul(&w.s, m, &mut w.left);
            self.flat.mul(mt, &w.s, &mut w.right);
            if w.left != w.right {
                return false;
            }
        }
        true
    }

    fn space_size(&self) -> u128 {
        (self.flat.p as u128).pow((self.flat.n * self.flat.n) as u32)
    }
}

fn check_budget(needed: u128, budget: u64) -> Result<u64, AttackError> {
    if needed > budget as u128 {
        return Err(AttackError::BudgetExceeded { needed, budget });
    }
    Ok(needed as u64)
}

fn result_from(c: MatrixFp<Fp64>, gens: &GeneratorSet<Fp64>, mode: SymmetrizerMode, tried: u128) -> Result<SymmetrizerResult, AttackError> {
    let conj = gens.conjugated(&c)?;
    let a_hat = conj.step_matrix(Step::A).clone();
    let b_hat = conj.step_matrix(Step::B).clone();
    debug_assert!(a_hat.is_symmetric() && b_hat.is_symmetric());
    Ok(SymmetrizerResult {
        c,
        a_hat,
        b_hat,
        mode,
        candidates_tried: tried,
        matches_found: 1,
    })
}

/// Finds an invertible `C` with `C A C^-1` and `C B C^-1` symmetric.
///
/// Exhaustive mode fails with `BudgetExceeded` when `p^(n^2)` exceeds
/// `budget`; in bilinear mode the budget caps the number of candidate `S`.
pub fn find_symmetrizer(
    gens: &GeneratorSet<Fp64>,
    mode: SymmetrizerMode,
    budget: u64,
) -> Result<SymmetrizerResult, AttackError> {
    match mode {
        SymmetrizerMode::Exhaustive => exhaustive(gens, budget),
        SymmetrizerMode::Bilinear => bilinear(gens, budget),
    }
}

fn exhaustive(gens: &GeneratorSet<Fp64>, budget: u64) -> Result<SymmetrizerResult, AttackError> {
    let identity = MatrixFp::identity(gens.field(), gens.n());
    if gens.step_matrix(Step::A).is_symmetric() && gens.step_matrix(Step::B).is_symmetric() {
        return result_from(identity, gens, SymmetrizerMode::Exhaustive, 1);
    }
    let crit = Criterion::new(gens);
    let total = check_budget(crit.space_size(), budget)?;
    let found = (0..total)
        .into_par_iter()
        .map_init(
            || crit.scratch(),
            |w, code| {
                crit.flat.decode(code, &mut w.c);
                (code, crit.symmetrizes(w) && crit.flat.det(&w.c, &mut w.det) != 0)
            },
        )
        .find_first(|(_, hit)| *hit);
    let (code, _) = found.ok_or(AttackError::NotFound)?;
    let mut c = vec![0; gens.n() * gens.n()];
    crit.flat.decode(code, &mut c);
    let n = gens.n();
    let c = MatrixFp::from_fn(gens.field(), n, |i, j| c[i * n + j]);
    result_from(c, gens, SymmetrizerMode::Exhaustive, code as u128 + 2)
}

/// Counts of symmetrizing matrices in `SL_n(F_p)` and `GL_n(F_p)`.
///
/// Scalars act trivially by conjugation, so the fraction in `GL_n` modulo
/// scalars equals the `GL_n` fraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityReport {
    pub n: usize,
    pub p: u64,
    pub sl_total: u64,
    pub sl_matches: u64,
    pub gl_total: u64,
    pub gl_matches: u64,
}

impl DensityReport {
    pub fn sl_fraction(&self) -> f64 {
        self.sl_matches as f64 / self.sl_total as f64
    }

    pub fn gl_fraction(&self) -> f64 {
        self.gl_matches as f64 / self.gl_total as f64
    }

    pub fn pgl_matches(&self) -> u64 {
        self.gl_matches / (self.p - 1)
    }

    pub fn pgl_total(&self) -> u64 {
        self.gl_total / (self.p - 1)
    }
}

/// Scans all `p^(n^2)` matrices and counts invertible and unit-determinant
/// symmetrizers.
pub fn symmetrizer_density(gens: &GeneratorSet<Fp64>, budget: u64) -> Result<DensityReport, AttackError> {
    let crit = Criterion::new(gens);
    let total = check_budget(crit.space_size(), budget)?;
    let zero = || [0u64; 4];
    let counts = (0..total)
        .into_par_iter()
        .fold(
            || (crit.scratch(), zero()),
            |(mut w, mut acc), code| {
                crit.flat.decode(code, &mut w.c);
                let det = crit.flat.det(&w.c, &mut w.det);
                if det != 0 {
                    let sym = crit.symmetrizes(&mut w);
                    acc[0] += 1;
                    acc[1] += u64::from(sym);
                    if det == 1 {
                        acc[2] += 1;
                        acc[3] += u64::from(sym);
                    }
                }
                (w, acc)
            },
        )
        .map(|(_, acc)| acc)
        .reduce(zero, |x, y| [x[0] + y[0], x[1] + y[1], x[2] + y[2], x[3] + y[3]]);
    Ok(DensityReport {
        n: gens.n(),
        p: gens.field().p(),
        gl_total: counts[0],
        gl_matches: counts[1],
        sl_total: counts[2],
        sl_matches: counts[3],
    })
}

/// Basis of `{x : rows x = 0}` over `F_p`.
fn nullspace(mut rows: Vec<Vec<u64>>, ncols: usize, f: &Fp64) -> Vec<Vec<u64>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][col] != 0) else { continue };
        rows.swap(r, pr);
        let inv = f.inv(&rows[r][col]).expect("nonzero pivot");
        for v in rows[r].iter_mut() {
            *v = f.mul(v, &inv);
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[col] != 0 {
                let factor = row[col];
                for (v, pv) in row.iter_mut().zip(&pivot) {
                    *v = f.sub(v, &f.mul(&factor, pv));
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0; ncols];
            v[fc] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(&rows[i][fc]);
            }
            v
        })
        .collect()
}

fn is_square(x: u64, f: &Fp64) -> bool {
    x == 0 || f.p() == 2 || f.pow(&x, (f.p() - 1) / 2) == 1
}

/// Tonelli-Shanks; `x` must be a square.
fn sqrt_mod(x: u64, f: &Fp64) -> u64 {
    let p = f.p();
    if x == 0 || p == 2 {
        return x;
    }
    let (mut q, mut s) = (p - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..p).find(|&z| !is_square(z, f)).expect("odd prime has a non-residue");
    let mut m = s;
    let mut c = f.pow(&z, q);
    let mut t = f.pow(&x, q);
    let mut r = f.pow(&x, q.div_ceil(2));
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = f.mul(&tt, &tt);
            i += 1;
        }
        let b = f.pow(&c, 1 << (m - i - 1));
        m = i;
        c = f.mul(&b, &b);
        t = f.mul(&t, &c);
        r = f.mul(&r, &b);
    }
    r
}

fn bilinear_form(s: &[u64], x: &[u64], y: &[u64], f: &Fp64) -> u64 {
    let n = x.len();
    let mut acc = 0;
    for i in 0..n {
        for j in 0..n {
            acc = f.add(&acc, &f.mul(&f.mul(&x[i], &s[i * n + j]), &y[j]));
        }
    }
    acc
}

/// Vectors `u_1..u_n` with `u_i^T S u_j = delta_ij`, found greedily.
fn orthonormal_basis(s: &[u64], n: usize, f: &Fp64) -> Option<Vec<Vec<u64>>> {
    let mut span: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect();
    let mut found = Vec::with_capacity(n);
    while !span.is_empty() {
        let d = span.len();
        let combos = (f.p() as u128).pow(d as u32);
        let mut pick = None;
        for code in 1..combos.min(1 << 24) {
            let mut v = vec![0u64; n];
            let mut rest = code;
            for w in &span {
                let coef = (rest % f.p() as u128) as u64;
                rest /= f.p() as u128;
                for k in 0..n {
                    v[k] = f.add(&v[k], &f.mul(&coef, &w[k]));
                }
            }
            let q = bilinear_form(s, &v, &v, f);
            if q != 0 && is_square(q, f) {
                pick = Some((v, q));
                break;
            }
        }
        let (v, q) = pick?;
        let scale = f.inv(&sqrt_mod(q, f)).ok()?;
        let u: Vec<u64> = v.iter().map(|x| f.mul(x, &scale)).collect();
        // project the span onto the orthogonal complement of u and drop the
        // dependency this introduces
        let projected: Vec<Vec<u64>> = span
            .iter()
            .map(|w| {
                let t = bilinear_form(s, &u, w, f);
                w.iter().zip(&u).map(|(wi, ui)| f.sub(wi, &f.mul(&t, ui))).collect()
            })
            .collect();
        span = row_basis(projected, f);
        if span.len() != d - 1 {
            return None;
        }
        found.push(u);
    }
    Some(found)
}

fn row_basis(mut rows: Vec<Vec<u64>>, f: &Fp64) -> Vec<Vec<u64>> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..ncols {
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][col] != 0) else { continue };
        rows.swap(r, pr);
        let inv = f.inv(&rows[r][col]).expect("nonzero pivot");
        let pivot = rows[r].clone();
        for row in rows[r + 1..].iter_mut() {
            let factor = f.mul(&row[col], &inv);
            if factor != 0 {
                for (v, pv) in row.iter_mut().zip(&pivot) {
                    *v = f.sub(v, &f.mul(&factor, pv));
                }
            }
        }
        r += 1;
    }
    rows.truncate(r);
    rows
}

fn bilinear(gens: &GeneratorSet<Fp64>, budget: u64) -> Result<SymmetrizerResult, AttackError> {
    let f = *gens.field();
    let n = gens.n();
    let unknowns: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let var = |i: usize, j: usize| unknowns.iter().position(|&u| u == (i.min(j), i.max(j))).expect("pair");
    let mut rows = Vec::new();
    for step in [Step::A, Step::B] {
        let m = gens.step_matrix(step);
        for r in 0..n {
            for c in 0..n {
                // (S M)_rc - (M^T S)_rc
                let mut row = vec![0u64; unknowns.len()];
                for k in 0..n {
                    let v = var(r, k);
                    row[v] = f.add(&row[v], m.get(k, c));
                    let v = var(k, c);
                    row[v] = f.sub(&row[v], m.get(k, r));
                }
                rows.push(row);
            }
        }
    }
    let basis = nullspace(rows, unknowns.len(), &f);
    if basis.is_empty() {
        return Err(AttackError::NotFound);
    }
    let combos = (f.p() as u128).pow(basis.len() as u32);
    let mut tried = 0u128;
    for code in 1..combos {
        if tried >= budget as u128 {
            return Err(AttackError::BudgetExceeded { needed: combos - 1, budget });
        }
        tried += 1;
        let mut sv = vec![0u64; unknowns.len()];
        let mut rest = code;
        for b in &basis {
            let coef = (rest % f.p() as u128) as u64;
            rest /= f.p() as u128;
            for (x, y) in sv.iter_mut().zip(b) {
                *x = f.add(x, &f.mul(&coef, y));
            }
        }
        let s = MatrixFp::from_fn(&f, n, |i, j| sv[var(i, j)]);
        if s.det() == 0 {
            continue;
        }
        let Some(us) = orthonormal_basis(s.entries(), n, &f) else { continue };
        // columns u_i: U^T S U = I, so C = U^-1 satisfies C^T C = S
        let u = MatrixFp::from_fn(&f, n, |i, j| us[j][i]);
        let c = u.inv()?;
        let conj = gens.conjugated(&c)?;
        if conj.step_matrix(Step::A).is_symmetric() && conj.step_matrix(Step::B).is_symmetric() {
            return result_from(c, gens, SymmetrizerMode::Bilinear, tried);
        }
    }
    Err(AttackError::NotFound)
}

/// `A M A + B M B`.
pub fn rho<F: PrimeField>(m: &MatrixFp<F>, a: &MatrixFp<F>, b: &MatrixFp<F>) -> Result<MatrixFp<F>, AlgebraError> {
    a.try_mul(m)?.try_mul(a)?.try_add(&b.try_mul(m)?.try_mul(b)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PowerWitness {
    /// An entry of `rho(M)` at `(row, col)` that is not an `i`-th power of
    /// any entry of `M`.
    Witness {
        i: u64,
        powers: BTreeSet<u64>,
        row: usize,
        col: usize,
        value: u64,
    },
    FailureAt(u64),
}

impl PowerWitness {
    pub fn is_witness(&self) -> bool {
        matches!(self, PowerWitness::Witness { .. })
    }
}

/// For each `i` in `1..p`, an entry of `rho(M)` outside `{e^i : e in M}`.
pub fn power_entry_witness(m: &MatrixFp<Fp64>, rho_m: &MatrixFp<Fp64>) -> Vec<PowerWitness> {
    let f = m.field();
    let n = rho_m.n();
    (1..f.p())
        .map(|i| {
            let powers: BTreeSet<u64> = m.entries().iter().map(|e| f.pow(e, i)).collect();
            match rho_m.entries().iter().position(|v| !powers.contains(v)) {
                Some(idx) => PowerWitness::Witness {
                    i,
                    powers,
                    row: idx / n,
                    col: idx % n,
                    value: rho_m.entries()[idx],
                },
                None => PowerWitness::FailureAt(i),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::MatrixZ;
    use crate::params::{build_generators, ParamSet};
    use proptest::prelude::*;

    fn gens(p: u64) -> GeneratorSet<Fp64> {
        build_generators(&ParamSet::concrete(p).unwrap()).unwrap()
    }

    fn fixed_c(f: &Fp64) -> MatrixFp<Fp64> {
        MatrixFp::from_u64_rows(f, &[&[2, 6, 10], &[5, 3, 10], &[2, 3, 3]])
    }

    fn sym_criterion(c: &MatrixFp<Fp64>, g: &GeneratorSet<Fp64>) -> bool {
        let crit = Criterion::new(g);
        let mut w = crit.scratch();
        w.c.copy_from_slice(c.entries());
        crit.symmetrizes(&mut w)
    }

    #[test]
    fn fixed_symmetrizer_at_eleven() {
        let g = gens(11);
        let c = fixed_c(g.field());
        assert!(sym_criterion(&c, &g));
        let conj = g.conjugated(&c).unwrap();
        let (a, b) = (conj.step_matrix(Step::A), conj.step_matrix(Step::B));
        assert_eq!(*a, MatrixFp::from_u64_rows(g.field(), &[&[3, 4, 10], &[4, 3, 2], &[10, 2, 8]]));
        assert_eq!(*b, MatrixFp::from_u64_rows(g.field(), &[&[7, 4, 7], &[4, 3, 2], &[7, 2, 4]]));
        let m = &(&(&(a * b) * a) * b) * a;
        assert_eq!(m, MatrixFp::from_u64_rows(g.field(), &[&[7, 4, 2], &[4, 0, 6], &[2, 6, 6]]));
        let r = rho(&m, a, b).unwrap();
        assert_eq!(r, MatrixFp::from_u64_rows(g.field(), &[&[2, 1, 5], &[1, 1, 7], &[5, 7, 7]]));
        assert!(power_entry_witness(&m, &r).iter().all(PowerWitness::is_witness));
    }

    #[test]
    fn rho_basics() {
        let f = Fp64::new(11).unwrap();
        let g = gens(11);
        let (a, b) = (g.step_matrix(Step::A), g.step_matrix(Step::B));
        assert!(rho(&MatrixFp::zero(&f, 3), a, b).unwrap().entries().iter().all(|e| *e == 0));
        assert!(rho(&MatrixFp::zero(&f, 2), a, b).is_err());
    }

    #[test]
    fn power_witness_edge_cases() {
        let f = Fp64::new(7).unwrap();
        let zero = MatrixFp::zero(&f, 2);
        let r = MatrixFp::from_u64_rows(&f, &[&[0, 3], &[0, 0]]);
        assert!(power_entry_witness(&zero, &r).iter().all(PowerWitness::is_witness));
        let m = MatrixFp::from_u64_rows(&f, &[&[1, 2], &[3, 4]]);
        assert_eq!(power_entry_witness(&m, &m)[0], PowerWitness::FailureAt(1));
    }

    #[test]
    fn already_symmetric_gives_identity() {
        let z = MatrixZ::from_i64_rows(&[&[2, 1, 0], &[1, 1, 0], &[0, 0, 1]]);
        let w = MatrixZ::from_i64_rows(&[&[1, 0, 0], &[0, 2, 1], &[0, 1, 1]]);
        let g = GeneratorSet::<Fp64>::from_integer_matrices(ParamSet::unchecked(3, 5u32.into(), 4, 2, 4), z, w).unwrap();
        let res = find_symmetrizer(&g, SymmetrizerMode::Exhaustive, 10).unwrap();
        assert!(res.c.is_identity());
        assert_eq!(res.candidates_tried, 1);
    }

    #[test]
    fn exhaustive_search_small_prime() {
        let g = gens(3);
        let res = find_symmetrizer(&g, SymmetrizerMode::Exhaustive, 1 << 20).unwrap();
        assert!(res.a_hat.is_symmetric() && res.b_hat.is_symmetric());
        assert_ne!(res.c.det(), 0);
        // lexicographically first: nothing earlier qualifies
        let crit = Criterion::new(&g);
        let mut w = crit.scratch();
        let found = res.c.entries().iter().fold(0u64, |acc, e| acc * 3 + e);
        for code in 0..found {
            crit.flat.decode(code, &mut w.c);
            assert!(!(crit.symmetrizes(&mut w) && crit.flat.det(&w.c, &mut w.det) != 0));
        }
        assert!(matches!(
            find_symmetrizer(&gens(11), SymmetrizerMode::Exhaustive, 1000),
            Err(AttackError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn bilinear_mode_agrees() {
        for p in [3u64, 5, 7, 11, 13] {
            let g = gens(p);
            let res = find_symmetrizer(&g, SymmetrizerMode::Bilinear, 10_000).unwrap();
            assert!(res.a_hat.is_symmetric() && res.b_hat.is_symmetric(), "p={p}");
        }
    }

    #[test]
    fn density_at_three() {
        let d = symmetrizer_density(&gens(3), 1 << 20).unwrap();
        assert_eq!(d.sl_total, 5616);
        assert_eq!(d.gl_total, 11232);
        assert_eq!(d.sl_matches, 24);
        assert_eq!(d.gl_matches % (d.p - 1), 0);
    }

    #[test]
    fn flat_det_matches_matrix_det() {
        let f = Fp64::new(7).unwrap();
        for n in [2usize, 3, 4] {
            let flat = Flat { n, p: 7 };
            let mut buf = vec![0; n * n];
            let mut scratch = Vec::new();
            let space = 7u64.pow((n * n) as u32);
            for code in (0..3000u64).map(|i| i.wrapping_mul(0x9e37_79b9_7f4a_7c15) % space) {
                flat.decode(code, &mut buf);
                let m = MatrixFp::from_fn(&f, n, |i, j| buf[i * n + j]);
                assert_eq!(flat.det(&buf, &mut scratch), m.det());
            }
        }
    }

    #[test]
    fn square_roots() {
        for p in [3u64, 5, 13, 17, 41, 1_000_003] {
            let f = Fp64::new(p).unwrap();
            for x in 1..p.min(500) {
                let sq = f.mul(&x, &x);
                let r = sqrt_mod(sq, &f);
                assert_eq!(f.mul(&r, &r), sq);
            }
        }
    }

    #[test]
    fn conjugation_preserves_collisions() {
        // all step words of length <= 6 at p = 3: equal products before
        // conjugation iff equal after
        let g = gens(3);
        let res = find_symmetrizer(&g, SymmetrizerMode::Exhaustive, 1 << 20).unwrap();
        let conj = g.conjugated(&res.c).unwrap();
        let mut words: Vec<Vec<Step>> = vec![vec![]];
        for _ in 0..4 {
            let next: Vec<Vec<Step>> = words
                .iter()
                .flat_map(|w| Step::ALL.iter().map(move |s| [w.clone(), vec![*s]].concat()))
                .collect();
            words.extend(next);
            words.sort();
            words.dedup();
        }
        let eval = |gs: &GeneratorSet<Fp64>, w: &[Step]| {
            w.iter().fold(MatrixFp::identity(gs.field(), 3), |acc, s| &acc * gs.step_matrix(*s))
        };
        let before: Vec<_> = words.iter().map(|w| eval(&g, w)).collect();
        let after: Vec<_> = words.iter().map(|w| eval(&conj, w)).collect();
        for i in (0..words.len()).step_by(7) {
            for j in 0..words.len() {
                assert_eq!(before[i] == before[j], after[i] == after[j]);
            }
        }
    }

    fn palindrome_from(half: &[usize], middle: Option<usize>) -> Vec<Step> {
        let mut w: Vec<Step> = half.iter().map(|&i| Step::from_index(i)).collect();
        if let Some(m) = middle {
            w.push(Step::from_index(m));
        }
        w.extend(half.iter().rev().map(|&i| Step::from_index(i)));
        w
    }

    #[test]
    fn short_palindromes_are_symmetric() {
        let g = gens(11);
        let conj = g.conjugated(&fixed_c(g.field())).unwrap();
        for len in 0..=5usize {
            for code in 0..4usize.pow(len as u32) {
                let word: Vec<Step> = (0..len).map(|i| Step::from_index(code / 4usize.pow(i as u32) % 4)).collect();
                let rev: Vec<Step> = word.iter().rev().copied().collect();
                if word != rev {
                    continue;
                }
                let m = word.iter().fold(MatrixFp::identity(g.field(), 3), |acc, s| &acc * conj.step_matrix(*s));
                assert!(m.is_symmetric());
            }
        }
    }

    proptest! {
        #[test]
        fn palindromes_are_symmetric(half in proptest::collection::vec(0usize..4, 0..20), middle in proptest::option::of(0usize..4)) {
            let g = gens(11);
            let conj = g.conjugated(&fixed_c(g.field())).unwrap();
            let word = palindrome_from(&half, middle);
            let m = word.iter().fold(MatrixFp::identity(g.field(), 3), |acc, s| &acc * conj.step_matrix(*s));
            prop_assert!(m.is_symmetric());
        }

        #[test]
        fn rho_keeps_symmetry(entries in proptest::collection::vec(0u64..11, 6)) {
            let g = gens(11);
            let conj = g.conjugated(&fixed_c(g.field())).unwrap();
            let e = &entries;
            let m = MatrixFp::from_u64_rows(g.field(), &[&[e[0], e[1], e[2]], &[e[1], e[3], e[4]], &[e[2], e[4], e[5]]]);
            let r = rho(&m, conj.step_matrix(Step::A), conj.step_matrix(Step::B)).unwrap();
            prop_assert!(r.is_symmetric());
        }
    }
}
