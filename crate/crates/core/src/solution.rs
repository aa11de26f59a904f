use thiserror::Error;

use crate::graph::{Vertex, Weight, WeightedGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertificateError {
    #[error("vertex {0} is not an alive vertex of the graph")]
    UnknownVertex(Vertex),
    #[error("vertex {0} listed twice")]
    Duplicate(Vertex),
    #[error("vertices {0} and {1} are adjacent")]
    NotIndependent(Vertex, Vertex),
    #[error("claimed weight {claimed} but the set weighs {actual}")]
    WeightMismatch { claimed: Weight, actual: Weight },
}

/// A vertex set with its claimed weight. `optimal` is only set by exact
/// procedures that finished.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Solution {
    pub vertices: Vec<Vertex>,
    pub weight: Weight,
    pub optimal: bool,
}

impl Solution {
    /// Sorts `vertices` and computes their weight in `g`.
    pub fn from_vertices(g: &WeightedGraph, mut vertices: Vec<Vertex>) -> Self {
        vertices.sort_unstable();
        let weight = g.set_weight_of(&vertices);
        Self { vertices, weight, optimal: false }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Checks independence in `g` and that the recomputed weight matches.
    pub fn verify(&self, g: &WeightedGraph) -> Result<(), CertificateError> {
        let mut sorted = self.vertices.clone();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(CertificateError::Duplicate(w[0]));
            }
        }
        if let Some(&v) = sorted.iter().find(|&&v| !g.is_alive(v)) {
            return Err(CertificateError::UnknownVertex(v));
        }
        if let Some((u, v)) = g.find_conflict(&sorted) {
            return Err(CertificateError::NotIndependent(u, v));
        }
        let actual = g.set_weight_of(&sorted);
        if actual != self.weight {
            return Err(CertificateError::WeightMismatch { claimed: self.weight, actual });
        }
        Ok(())
    }
}

/// Extends `partial` to a maximal independent set, scanning vertices by
/// descending weight (ties: lower id first).
pub fn greedy_complete(g: &WeightedGraph, partial: &Solution) -> Solution {
    let mut blocked = vec![false; g.capacity()];
    let mut chosen = vec![false; g.capacity()];
    for &v in &partial.vertices {
        chosen[v] = true;
        for &u in g.neighbors(v) {
            blocked[u] = true;
        }
    }
    let mut order: Vec<Vertex> = g.vertices().collect();
    order.sort_by(|&a, &b| g.weight(b).cmp(&g.weight(a)).then(a.cmp(&b)));
    let mut vertices = partial.vertices.clone();
    for v in order {
        if chosen[v] || blocked[v] {
            continue;
        }
        chosen[v] = true;
        vertices.push(v);
        for &u in g.neighbors(v) {
            blocked[u] = true;
        }
    }
    let mut out = Solution::from_vertices(g, vertices);
    out.optimal = partial.optimal && out.weight == partial.weight;
    out
}
