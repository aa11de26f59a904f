#![allow(dead_code)]

use mwis::generate;
use mwis::{Vertex, Weight, WeightedGraph};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn graph(weights: &[Weight], edges: &[(Vertex, Vertex)]) -> WeightedGraph {
    WeightedGraph::from_edges(weights.to_vec(), edges).unwrap()
}

/// G(n, p) with weights uniform in [1, 200].
pub fn random_graph(seed: u64, n: usize, p: f64) -> WeightedGraph {
    let mut r = rng(seed);
    let w = generate::uniform_weights(n, 1, 200, &mut r);
    generate::gnp(n, p, w, &mut r)
}

/// Seeded graph with n in [1, max_n] and p in {0.1, 0.3, 0.6}.
pub fn seeded_small_graph(seed: u64, max_n: usize) -> WeightedGraph {
    let mut r = rng(seed ^ 0x5eed);
    let n = r.gen_range(1..=max_n);
    let p = [0.1, 0.3, 0.6][r.gen_range(0..3)];
    random_graph(seed, n, p)
}

/// Paths, cycles, stars, cliques, twin gadgets and small rule topologies.
pub fn structured_family(seed: u64) -> Vec<WeightedGraph> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    for n in 1..=12 {
        let w = |r: &mut ChaCha8Rng| generate::uniform_weights(n, 1, 200, r);
        out.push(generate::path(w(&mut r)));
        out.push(generate::cycle(w(&mut r)));
        out.push(generate::star(w(&mut r)));
        out.push(generate::clique(w(&mut r)));
        out.push(generate::random_tree(w(&mut r), &mut r));
    }
    for k in 1..=6 {
        let w = generate::uniform_weights(k + 2, 1, 200, &mut r);
        out.push(generate::twin_gadget(k, 0.4, w, &mut r));
    }
    // vertex folding: v of weight 5 between two non-adjacent neighbours of weight 3
    out.push(graph(&[5, 3, 3, 2, 2], &[(0, 1), (0, 2), (1, 3), (2, 4)]));
    // weight transfer: simplicial vertex lighter than some neighbours
    out.push(graph(&[4, 6, 2, 1, 5], &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 4)]));
    // twins 0, 1 over an independent neighbourhood 2, 3, 4: taken, then folded
    let twins = [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 5)];
    out.push(graph(&[5, 5, 3, 3, 3, 1], &twins));
    out.push(graph(&[4, 4, 3, 3, 3, 1], &twins));
    // domination: N[1] contains N[0] and w(1) <= w(0)
    out.push(graph(&[6, 2, 3, 1], &[(0, 1), (0, 2), (1, 2), (2, 3)]));
    // neighbourhood removal: w(0) >= w(N(0))
    out.push(graph(&[9, 4, 3, 8], &[(0, 1), (0, 2), (1, 3), (2, 3)]));
    out
}

/// Proptest strategy for small weighted graphs.
pub fn arb_graph(max_n: usize) -> impl Strategy<Value = WeightedGraph> {
    (1..=max_n, prop_oneof![Just(0.1), Just(0.3), Just(0.6)]).prop_flat_map(|(n, p)| {
        let pairs = n * (n - 1) / 2;
        (
            proptest::collection::vec(1u64..=200, n),
            proptest::collection::vec(proptest::bool::weighted(p), pairs),
        )
            .prop_map(move |(weights, bits)| {
                let mut edges = Vec::new();
                let mut k = 0;
                for u in 0..n {
                    for v in u + 1..n {
                        if bits[k] {
                            edges.push((u, v));
                        }
                        k += 1;
                    }
                }
                WeightedGraph::from_edges(weights, &edges).unwrap()
            })
    })
}
