use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::algebra::{MatrixFp, MatrixZ, PrimeField};
use crate::hasher::Step;
use crate::params::GeneratorSet;

/// Largest `g` with `(n c)^g <= p - 1`, i.e. `floor(log(p-1) / log(nc))`
/// without floating point.
///
/// # Panics
/// If `n c < 2`, where the bound is unbounded.
pub fn girth_lower_bound(n: u64, c: &BigUint, p: &BigUint) -> u64 {
    let base = BigUint::from(n) * c;
    assert!(base >= BigUint::from(2u32), "n*c must be at least 2");
    if p.is_zero() {
        return 0;
    }
    let target = p - BigUint::one();
    let mut power = base.clone();
    let mut g = 0;
    while power <= target {
        power *= &base;
        g += 1;
    }
    g
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GirthMeasurement {
    Found { girth: usize, relator: Vec<Step> },
    NotFoundWithin(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GirthReport {
    pub theoretical_lower: u64,
    pub measured: GirthMeasurement,
}

impl GirthReport {
    pub fn girth(&self) -> Option<usize> {
        match self.measured {
            GirthMeasurement::Found { girth, .. } => Some(girth),
            GirthMeasurement::NotFoundWithin(_) => None,
        }
    }

    pub fn relator(&self) -> Option<&[Step]> {
        match &self.measured {
            GirthMeasurement::Found { relator, .. } => Some(relator),
            GirthMeasurement::NotFoundWithin(_) => None,
        }
    }
}

struct Node {
    parent: u32,
    step: Step,
}

/// Breadth-first search over reduced words from the identity, stopping at
/// the first word of positive length that evaluates to `I`. States are
/// `(element, last step)`, so two words reaching the same state share every
/// continuation and only the first is expanded.
pub fn measure_girth<F: PrimeField>(gens: &GeneratorSet<F>, radius: usize) -> GirthReport {
    let p = gens.field().modulus();
    let theoretical_lower = girth_lower_bound(gens.n() as u64, gens.entry_bound(), &p);
    let report = |measured| GirthReport { theoretical_lower, measured };

    const ROOT: u32 = u32::MAX;
    let mut nodes: Vec<Node> = Vec::new();
    let mut seen: HashSet<(MatrixFp<F>, Step)> = HashSet::new();
    let mut frontier: Vec<(u32, Option<Step>, MatrixFp<F>)> =
        vec![(ROOT, None, MatrixFp::identity(gens.field(), gens.n()))];

    let path = |nodes: &[Node], mut at: u32| {
        let mut word = Vec::new();
        while at != ROOT {
            word.push(nodes[at as usize].step);
            at = nodes[at as usize].parent;
        }
        word.reverse();
        word
    };

    for depth in 1..=radius {
        let mut next = Vec::with_capacity(frontier.len() * 3);
        for (node, last, m) in &frontier {
            for s in Step::ALL {
                if Some(s.inverse()) == *last {
                    continue;
                }
                let product = m * gens.step_matrix(s);
                if product.is_identity() {
                    let mut relator = if *node == ROOT { Vec::new() } else { path(&nodes, *node) };
                    relator.push(s);
                    return report(GirthMeasurement::Found { girth: depth, relator });
                }
                if seen.insert((product.clone(), s)) {
                    nodes.push(Node { parent: *node, step: s });
                    next.push(((nodes.len() - 1) as u32, Some(s), product));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    report(GirthMeasurement::NotFoundWithin(radius))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreenessReport {
    pub max_length: usize,
    pub words_checked: u64,
    pub relator: Option<Vec<Step>>,
}

/// Exhaustive search over the integers for a nonempty reduced word of
/// length at most `max_length` that equals `I`.
pub fn search_free_relation<F: PrimeField>(gens: &GeneratorSet<F>, max_length: usize) -> FreenessReport {
    fn dfs<F: PrimeField>(
        gens: &GeneratorSet<F>,
        m: &MatrixZ,
        word: &mut Vec<Step>,
        max_length: usize,
        checked: &mut u64,
    ) -> Option<Vec<Step>> {
        if word.len() == max_length {
            return None;
        }
        for s in Step::ALL {
            if word.last().map(|l| l.inverse()) == Some(s) {
                continue;
            }
            let next = m.try_mul(gens.integer_step_matrix(s)).expect("square generators");
            word.push(s);
            *checked += 1;
            if next.is_identity() {
                return Some(word.clone());
            }
            if let Some(found) = dfs(gens, &next, word, max_length, checked) {
                return Some(found);
            }
            word.pop();
        }
        None
    }

    let mut words_checked = 0;
    let relator = dfs(gens, &MatrixZ::identity(gens.n()), &mut Vec::new(), max_length, &mut words_checked);
    FreenessReport {
        max_length,
        words_checked,
        relator,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Fp64;
    use crate::params::{build_generators, ParamSet};

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn eval(word: &[Step], gens: &GeneratorSet<Fp64>) -> MatrixFp<Fp64> {
        word.iter()
            .fold(MatrixFp::identity(gens.field(), gens.n()), |acc, s| &acc * gens.step_matrix(*s))
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(girth_lower_bound(3, &big(160), &big(2)), 0);
        assert_eq!(girth_lower_bound(3, &big(160), &big(11)), 0);
        let p = num_traits::pow(big(480), 5) + 1u32;
        assert_eq!(girth_lower_bound(3, &big(160), &p), 5);
        assert_eq!(girth_lower_bound(3, &big(160), &(p - 1u32)), 4);
        assert_eq!(girth_lower_bound(2, &big(1), &big(9)), 3);
    }

    #[test]
    fn measured_girth_small_primes() {
        for p in [3u64, 5] {
            let gens = build_generators::<Fp64>(&ParamSet::concrete(p).unwrap()).unwrap();
            let report = measure_girth(&gens, 40);
            let g = report.girth().expect("finite group has finite girth");
            let w = report.relator().unwrap();
            assert_eq!(w.len(), g);
            assert!(eval(w, &gens).is_identity());
            for pair in w.windows(2) {
                assert_ne!(pair[1], pair[0].inverse());
            }
            assert!(g as u64 >= report.theoretical_lower);
        }
    }

    #[test]
    fn budget_exhaustion() {
        let gens = build_generators::<Fp64>(&ParamSet::concrete(1_000_003).unwrap()).unwrap();
        let report = measure_girth(&gens, 3);
        assert_eq!(report.measured, GirthMeasurement::NotFoundWithin(3));
        assert_eq!(report.theoretical_lower, 2);
    }

    #[test]
    fn freeness_short_words() {
        let gens = build_generators::<Fp64>(&ParamSet::concrete(11).unwrap()).unwrap();
        let report = search_free_relation(&gens, 5);
        assert_eq!(report.relator, None);
        assert_eq!(report.words_checked, 4 * (1 + 3 + 9 + 27 + 81));
    }
}
