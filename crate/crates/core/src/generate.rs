//! Seeded random and structured graph families.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{Vertex, Weight, WeightedGraph};

fn build(weights: Vec<Weight>, edges: &[(Vertex, Vertex)]) -> WeightedGraph {
    WeightedGraph::from_edges(weights, edges).expect("generated edges are valid")
}

pub fn uniform_weights<R: Rng>(n: usize, lo: Weight, hi: Weight, rng: &mut R) -> Vec<Weight> {
    (0..n).map(|_| rng.gen_range(lo..=hi)).collect()
}

/// Erdős–Rényi graph: every pair is an edge with probability `p`.
pub fn gnp<R: Rng>(n: usize, p: f64, weights: Vec<Weight>, rng: &mut R) -> WeightedGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    build(weights, &edges)
}

/// Uniform graph with `m` distinct edges (capped at the complete graph).
pub fn gnm<R: Rng>(n: usize, m: usize, weights: Vec<Weight>, rng: &mut R) -> WeightedGraph {
    let max_edges = n * n.saturating_sub(1) / 2;
    let m = m.min(max_edges);
    let mut seen = std::collections::HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    while edges.len() < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        let e = (u.min(v), u.max(v));
        if seen.insert(e) {
            edges.push(e);
        }
    }
    build(weights, &edges)
}

/// Random recursive tree: vertex `i > 0` attaches to a uniform earlier one,
/// then ids are shuffled.
pub fn random_tree<R: Rng>(weights: Vec<Weight>, rng: &mut R) -> WeightedGraph {
    let n = weights.len();
    let mut perm: Vec<Vertex> = (0..n).collect();
    perm.shuffle(rng);
    let edges: Vec<_> = (1..n).map(|i| (perm[rng.gen_range(0..i)], perm[i])).collect();
    build(weights, &edges)
}

pub fn path(weights: Vec<Weight>) -> WeightedGraph {
    let edges: Vec<_> = (1..weights.len()).map(|i| (i - 1, i)).collect();
    build(weights, &edges)
}

pub fn cycle(weights: Vec<Weight>) -> WeightedGraph {
    let n = weights.len();
    let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    if n >= 3 {
        edges.push((n - 1, 0));
    }
    build(weights, &edges)
}

/// Vertex 0 is the centre.
pub fn star(weights: Vec<Weight>) -> WeightedGraph {
    let edges: Vec<_> = (1..weights.len()).map(|i| (0, i)).collect();
    build(weights, &edges)
}

pub fn clique(weights: Vec<Weight>) -> WeightedGraph {
    let n = weights.len();
    let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    build(weights, &edges)
}

/// Two non-adjacent twins `0, 1` sharing neighbours `2..2 + k`, which form
/// a random graph with edge probability `p`.
pub fn twin_gadget<R: Rng>(k: usize, p: f64, weights: Vec<Weight>, rng: &mut R) -> WeightedGraph {
    assert_eq!(weights.len(), k + 2);
    let mut edges = Vec::new();
    for i in 2..k + 2 {
        edges.push((0, i));
        edges.push((1, i));
        for j in i + 1..k + 2 {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    build(weights, &edges)
}
