use rayon::prelude::*;

use crate::hasher::{AttributionTable, Step};

use super::group::{CayleyGraph, IDENTITY};
use super::AnalysisError;

/// A probability vector over the vertices of an enumerated group.
///
/// `universe` is the size of the ambient group; vertices beyond `probs.len()`
/// implicitly carry probability zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
    universe: usize,
}

impl Distribution {
    pub fn new(probs: Vec<f64>, universe: usize) -> Result<Self, AnalysisError> {
        if probs.len() > universe {
            return Err(AnalysisError::InvalidDistribution(format!(
                "{} weights for a universe of {universe}",
                probs.len()
            )));
        }
        if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(AnalysisError::InvalidDistribution(format!("weight {bad}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(AnalysisError::InvalidDistribution(format!("total mass {total}")));
        }
        Ok(Distribution { probs, universe })
    }

    pub fn uniform(universe: usize) -> Self {
        Distribution {
            probs: vec![1.0 / universe as f64; universe],
            universe,
        }
    }

    pub fn point_mass(at: usize, universe: usize) -> Self {
        let mut probs = vec![0.0; universe];
        probs[at] = 1.0;
        Distribution { probs, universe }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn prob(&self, v: usize) -> f64 {
        self.probs.get(v).copied().unwrap_or(0.0)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

/// `max_g |d(g) - 1/N|` over all `N` group elements, including those
/// outside the stored support.
pub fn linf_distance(d: &Distribution) -> f64 {
    let u = 1.0 / d.universe as f64;
    let stored = d.probs.iter().map(|p| (p - u).abs()).fold(0.0, f64::max);
    if d.probs.len() < d.universe {
        stored.max(u)
    } else {
        stored
    }
}

/// Exact evolution of the non-backtracking walk driven by uniform trits.
///
/// The state is the joint law of `(current element, last step)`. Each
/// advance pulls mass along the three admissible continuations of every
/// state with weight 1/3.
pub struct WalkEvolution<'g> {
    graph: &'g CayleyGraph,
    table: AttributionTable,
    // predecessors[s]: last steps l whose successor row contains s
    predecessors: [Vec<Step>; 4],
    k: usize,
    states: Vec<f64>,
    scratch: Vec<f64>,
}

impl<'g> WalkEvolution<'g> {
    pub fn new(graph: &'g CayleyGraph, table: &AttributionTable) -> Self {
        let mut predecessors: [Vec<Step>; 4] = Default::default();
        for l in Step::ALL {
            let row = table.row(table.row_after(l));
            for s in row {
                predecessors[s.index()].push(l);
            }
        }
        WalkEvolution {
            graph,
            table: *table,
            predecessors,
            k: 0,
            states: vec![0.0; graph.len() * 4],
            scratch: vec![0.0; graph.len() * 4],
        }
    }

    /// Number of trits consumed so far.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn advance(&mut self) {
        if self.k == 0 {
            for s in self.table.row(self.table.first_row()) {
                let v = self.graph.neighbor(IDENTITY, s) as usize;
                self.states[v * 4 + s.index()] += 1.0 / 3.0;
            }
        } else {
            let graph = self.graph;
            let states = &self.states;
            let predecessors = &self.predecessors;
            self.scratch.par_chunks_mut(4).enumerate().for_each(|(v, out)| {
                for s in Step::ALL {
                    // the walk arrived at v by s, so it came from v * s^-1
                    let u = graph.neighbor(v as u32, s.inverse()) as usize;
                    let mass: f64 = predecessors[s.index()].iter().map(|l| states[u * 4 + l.index()]).sum();
                    out[s.index()] = mass / 3.0;
                }
            });
            std::mem::swap(&mut self.states, &mut self.scratch);
        }
        self.k += 1;
    }

    /// Law of the current element, with the last step marginalized out.
    pub fn distribution(&self) -> Distribution {
        let universe = self.graph.len();
        if self.k == 0 {
            return Distribution::point_mass(IDENTITY as usize, universe);
        }
        let probs = self.states.chunks(4).map(|c| c.iter().sum()).collect();
        Distribution { probs, universe }
    }
}

/// Exact law of `phi(X)` for `X` uniform on `[3]^k`.
pub fn walk_distribution(graph: &CayleyGraph, table: &AttributionTable, k: usize) -> Distribution {
    let mut walk = WalkEvolution::new(graph, table);
    for _ in 0..k {
        walk.advance();
    }
    walk.distribution()
}
