use std::collections::{HashSet, VecDeque};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rustc_hash::FxHashMap;

use crate::algebra::{Fp64, MatrixFp, PrimeField};
use crate::hasher::Step;
use crate::params::GeneratorSet;

use super::AnalysisError;

/// `|SL_n(F_p)| = p^(n(n-1)/2) * prod_{k=2..n} (p^k - 1)`.
pub fn group_order(n: usize, p: &BigUint) -> BigUint {
    let mut order = num_traits::pow(p.clone(), n * (n - 1) / 2);
    for k in 2..=n {
        order *= num_traits::pow(p.clone(), k) - BigUint::one();
    }
    order
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosureSize {
    Complete(u64),
    Exceeded,
}

/// Size of the subgroup generated by the step matrices, or `Exceeded` once
/// more than `budget` elements have been found.
pub fn closure_size<F: PrimeField>(gens: &GeneratorSet<F>, budget: u64) -> ClosureSize {
    let identity = MatrixFp::identity(gens.field(), gens.n());
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(identity.clone());
    queue.push_back(identity);
    if budget == 0 {
        return ClosureSize::Exceeded;
    }
    while let Some(m) = queue.pop_front() {
        for s in Step::ALL {
            let next = &m * gens.step_matrix(s);
            if !seen.contains(&next) {
                if seen.len() as u64 >= budget {
                    return ClosureSize::Exceeded;
                }
                seen.insert(next.clone());
                queue.push_back(next);
            }
        }
    }
    ClosureSize::Complete(seen.len() as u64)
}

/// The Cayley graph of `<A, B>` with explicit vertex indices and the
/// right-multiplication table `v -> v * s` for every step `s`.
///
/// Vertices are stored as packed `u16` residues and keyed by their base-`p`
/// encoding, so this only covers groups with `p^(n^2) < 2^64`.
pub struct CayleyGraph {
    n: usize,
    p: u64,
    elements: Vec<u16>,
    index: FxHashMap<u64, u32>,
    transitions: Vec<[u32; 4]>,
    universe: BigUint,
}

pub const IDENTITY: u32 = 0;

impl CayleyGraph {
    /// Breadth-first closure from the identity. Fails once more than
    /// `budget` vertices are discovered.
    pub fn enumerate(gens: &GeneratorSet<Fp64>, budget: usize) -> Result<Self, AnalysisError> {
        let n = gens.n();
        let p = gens.field().p();
        let encodable = p < 1 << 16 && (p as u128).checked_pow((n * n) as u32).is_some_and(|v| v <= u64::MAX as u128);
        if !encodable {
            return Err(AnalysisError::NotEnumerable { n, p: BigUint::from(p) });
        }
        let steps: Vec<Vec<u64>> = Step::ALL
            .iter()
            .map(|s| gens.step_matrix(*s).entries().to_vec())
            .collect();
        let universe = group_order(n, &BigUint::from(p));

        let mut graph = CayleyGraph {
            n,
            p,
            elements: Vec::new(),
            index: FxHashMap::default(),
            transitions: Vec::new(),
            universe,
        };
        let identity: Vec<u16> = (0..n * n).map(|i| u16::from(i % (n + 1) == 0)).collect();
        graph.insert(&identity);

        let mut product = vec![0u16; n * n];
        let mut cursor = 0usize;
        while cursor < graph.len() {
            let mut row = [0u32; 4];
            for (si, step) in steps.iter().enumerate() {
                let base = cursor * n * n;
                for r in 0..n {
                    for c in 0..n {
                        let mut acc = 0u64;
                        for k in 0..n {
                            acc += graph.elements[base + r * n + k] as u64 * step[k * n + c];
                        }
                        product[r * n + c] = (acc % p) as u16;
                    }
                }
                let idx = match graph.index.get(&graph.encode(&product)) {
                    Some(&i) => i,
                    None => {
                        if graph.len() >= budget {
                            return Err(AnalysisError::GroupTooLarge { budget });
                        }
                        graph.insert(&product)
                    }
                };
                row[si] = idx;
            }
            graph.transitions.push(row);
            cursor += 1;
        }
        Ok(graph)
    }

    fn encode(&self, entries: &[u16]) -> u64 {
        entries.iter().fold(0u64, |acc, &e| acc * self.p + e as u64)
    }

    fn insert(&mut self, entries: &[u16]) -> u32 {
        let idx = self.len() as u32;
        self.index.insert(self.encode(entries), idx);
        self.elements.extend_from_slice(entries);
        idx
    }

    pub fn len(&self) -> usize {
        self.elements.len() / (self.n * self.n)
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// `|SL_n(F_p)|`, which equals `len()` exactly when `A, B` generate.
    pub fn group_order(&self) -> &BigUint {
        &self.universe
    }

    pub fn generates(&self) -> bool {
        self.universe.to_usize() == Some(self.len())
    }

    #[inline]
    pub fn neighbor(&self, v: u32, s: Step) -> u32 {
        self.transitions[v as usize][s.index()]
    }

    pub fn element(&self, v: u32) -> MatrixFp<Fp64> {
        let nn = self.n * self.n;
        let base = v as usize * nn;
        let field = Fp64::new(self.p).expect("graph modulus is prime");
        MatrixFp::from_fn(&field, self.n, |i, j| self.elements[base + i * self.n + j] as u64)
    }

    pub fn index_of(&self, m: &MatrixFp<Fp64>) -> Option<u32> {
        if m.n() != self.n || m.field().p() != self.p {
            return None;
        }
        let code = m.entries().iter().fold(0u64, |acc, &e| acc * self.p + e);
        self.index.get(&code).copied()
    }

    /// Largest distance from the identity. The graph is vertex-transitive,
    /// so this is its diameter.
    pub fn eccentricity(&self) -> usize {
        let mut dist = vec![usize::MAX; self.len()];
        let mut queue = VecDeque::from([IDENTITY]);
        dist[IDENTITY as usize] = 0;
        let mut far = 0;
        while let Some(v) = queue.pop_front() {
            let d = dist[v as usize];
            far = far.max(d);
            for s in Step::ALL {
                let u = self.neighbor(v, s) as usize;
                if dist[u] == usize::MAX {
                    dist[u] = d + 1;
                    queue.push_back(u as u32);
                }
            }
        }
        far
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::MatrixZ;
    use crate::params::{build_generators, ParamSet};

    fn elementary_gens(n: usize, p: u64) -> GeneratorSet<Fp64> {
        // a transvection and a signed cyclic shift; conjugates of the first
        // by powers of the second are enough to generate SL_n
        let upper = MatrixZ::from_fn(n, |i, j| ((i == j) as i64 + (i == 0 && j == 1) as i64).into());
        let shift = MatrixZ::from_fn(n, |i, j| {
            let v = if (i + 1) % n == j { 1 } else { 0 };
            let sign = if n.is_multiple_of(2) && i == n - 1 { -1 } else { 1 };
            (v * sign).into()
        });
        GeneratorSet::from_integer_matrices(ParamSet::unchecked(n, BigUint::from(p), 2, 2, 2), upper, shift).unwrap()
    }

    #[test]
    fn order_formula_matches_enumeration() {
        for (n, p, expected) in [(2usize, 2u64, 6u64), (3, 2, 168), (3, 3, 5616), (2, 3, 24), (2, 5, 120)] {
            assert_eq!(group_order(n, &BigUint::from(p)), BigUint::from(expected));
            let graph = CayleyGraph::enumerate(&elementary_gens(n, p), 1_000_000).unwrap();
            assert_eq!(graph.len() as u64, expected, "SL_{n}(F_{p})");
            assert_eq!(closure_size(&elementary_gens(n, p), 1_000_000), ClosureSize::Complete(expected));
        }
    }

    #[test]
    fn concrete_generators_span_sl3_f3() {
        let gens = build_generators(&ParamSet::concrete(3).unwrap()).unwrap();
        let graph = CayleyGraph::enumerate(&gens, 10_000).unwrap();
        assert_eq!(graph.len(), 5616);
        assert!(graph.generates());
        for v in [0u32, 17, 5000] {
            let m = graph.element(v);
            for s in Step::ALL {
                let next = &m * gens.step_matrix(s);
                assert_eq!(graph.index_of(&next), Some(graph.neighbor(v, s)));
                assert_eq!(graph.neighbor(graph.neighbor(v, s), s.inverse()), v);
            }
        }
        assert!(matches!(
            CayleyGraph::enumerate(&gens, 100),
            Err(AnalysisError::GroupTooLarge { budget: 100 })
        ));
        let d = graph.eccentricity();
        assert!((3..30).contains(&d), "diameter {d}");
    }
}
