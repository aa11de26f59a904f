//! Greedy weighted clique cover upper bound.

use crate::graph::{Vertex, Weight, WeightedGraph};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueCover {
    pub cliques: Vec<Vec<Vertex>>,
    pub clique_weights: Vec<Weight>,
}

impl CliqueCover {
    pub fn total(&self) -> Weight {
        self.clique_weights.iter().sum()
    }
}

/// Builds a cover by visiting vertices in descending weight (ties: higher
/// degree, then lower id). Each vertex joins the heaviest existing clique it
/// is fully adjacent to, or opens a new clique weighing `w(v)`.
pub fn clique_cover(g: &WeightedGraph) -> CliqueCover {
    let mut order: Vec<Vertex> = g.vertices().collect();
    order.sort_by(|&a, &b| {
        g.weight(b).cmp(&g.weight(a)).then(g.degree(b).cmp(&g.degree(a))).then(a.cmp(&b))
    });
    let mut clique_of = vec![usize::MAX; g.capacity()];
    let mut hits: Vec<usize> = Vec::new();
    let mut touched: Vec<usize> = Vec::new();
    let mut cliques: Vec<Vec<Vertex>> = Vec::new();
    let mut clique_weights: Vec<Weight> = Vec::new();
    for v in order {
        for &u in g.neighbors(v) {
            let c = clique_of[u];
            if c == usize::MAX {
                continue;
            }
            if hits[c] == 0 {
                touched.push(c);
            }
            hits[c] += 1;
        }
        // a clique is a candidate when v is adjacent to all of its members;
        // the heaviest wins, ties to the earliest created
        let mut best: Option<usize> = None;
        for &c in &touched {
            if hits[c] == cliques[c].len() && best.is_none_or(|b| (clique_weights[c], std::cmp::Reverse(c)) > (clique_weights[b], std::cmp::Reverse(b))) {
                best = Some(c);
            }
        }
        for &c in &touched {
            hits[c] = 0;
        }
        touched.clear();
        let c = match best {
            Some(c) => c,
            None => {
                cliques.push(Vec::new());
                clique_weights.push(g.weight(v));
                hits.push(0);
                cliques.len() - 1
            }
        };
        cliques[c].push(v);
        clique_of[v] = c;
    }
    CliqueCover { cliques, clique_weights }
}

/// Weight of [`clique_cover`]; at least the maximum independent set weight.
pub fn clique_cover_bound(g: &WeightedGraph) -> Weight {
    clique_cover(g).total()
}
