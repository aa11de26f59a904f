//! Exhaustive reference solvers. Deliberately naive: every subset of the
//! alive vertices is enumerated as a bitmask.

use thiserror::Error;

use crate::graph::{Vertex, Weight, WeightedGraph};
use crate::solution::Solution;

pub const MWIS_LIMIT: usize = 24;
pub const CRITICAL_SET_LIMIT: usize = 14;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("graph has {size} vertices, brute force is limited to {limit}")]
    TooLarge { size: usize, limit: usize },
}

/// Alive vertices, their weights and adjacency bitmasks over local indices.
struct Dense {
    ids: Vec<Vertex>,
    weights: Vec<Weight>,
    adj: Vec<u32>,
}

impl Dense {
    fn new(g: &WeightedGraph, vertices: &[Vertex], limit: usize) -> Result<Self, OracleError> {
        if vertices.len() > limit {
            return Err(OracleError::TooLarge { size: vertices.len(), limit });
        }
        let ids = vertices.to_vec();
        let weights = ids.iter().map(|&v| g.weight(v)).collect();
        let adj = ids
            .iter()
            .map(|&v| {
                ids.iter()
                    .enumerate()
                    .filter(|&(_, &u)| g.has_edge(u, v))
                    .fold(0u32, |m, (i, _)| m | (1 << i))
            })
            .collect();
        Ok(Self { ids, weights, adj })
    }

    fn independent(&self, mask: u32) -> bool {
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            if self.adj[i] & mask != 0 {
                return false;
            }
            rest &= rest - 1;
        }
        true
    }

    fn weight(&self, mask: u32) -> Weight {
        bits(mask).map(|i| self.weights[i]).sum()
    }

    fn neighborhood(&self, mask: u32) -> u32 {
        bits(mask).fold(0, |m, i| m | self.adj[i])
    }

    fn members(&self, mask: u32) -> Vec<Vertex> {
        bits(mask).map(|i| self.ids[i]).collect()
    }

    /// Best independent mask; ties go to the lexicographically smallest
    /// ascending vertex list.
    fn best_independent(&self) -> (u32, Weight) {
        let n = self.ids.len();
        let mut best = (0u32, 0 as Weight);
        for mask in 1..(1u64 << n) {
            let mask = mask as u32;
            if !self.independent(mask) {
                continue;
            }
            let w = self.weight(mask);
            if w > best.1 || (w == best.1 && lex_less(mask, best.0)) {
                best = (mask, w);
            }
        }
        best
    }
}

fn bits(mask: u32) -> impl Iterator<Item = usize> {
    let mut rest = mask;
    std::iter::from_fn(move || {
        if rest == 0 {
            return None;
        }
        let i = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        Some(i)
    })
}

/// Compares the ascending index sequences of two masks lexicographically.
fn lex_less(a: u32, b: u32) -> bool {
    let mut ia = bits(a);
    let mut ib = bits(b);
    loop {
        match (ia.next(), ib.next()) {
            (None, None) => return false,
            (None, Some(_)) => return true,
            (Some(_), None) => return false,
            (Some(x), Some(y)) if x != y => return x < y,
            _ => {}
        }
    }
}

/// Exact maximum weight independent set by enumeration (at most
/// [`MWIS_LIMIT`] alive vertices).
pub fn brute_force_mwis(g: &WeightedGraph) -> Result<Solution, OracleError> {
    let vertices: Vec<Vertex> = g.vertices().collect();
    let dense = Dense::new(g, &vertices, MWIS_LIMIT)?;
    let (mask, weight) = dense.best_independent();
    Ok(Solution { vertices: dense.members(mask), weight, optimal: true })
}

/// Weight of a maximum independent set of `G[vertices]`.
pub fn max_weight_induced(g: &WeightedGraph, vertices: &[Vertex], limit: usize) -> Result<Weight, OracleError> {
    let dense = Dense::new(g, vertices, limit.min(MWIS_LIMIT))?;
    Ok(dense.best_independent().1)
}

/// Set `U` maximising `w(U) - w(N(U))` where `N(U)` is the union of the open
/// neighbourhoods of `U` (members of `U` are not excluded). Ties go to the
/// smallest cardinality, then lexicographically smallest set.
pub fn brute_force_critical_set(g: &WeightedGraph) -> Result<(Vec<Vertex>, i64), OracleError> {
    let vertices: Vec<Vertex> = g.vertices().collect();
    let dense = Dense::new(g, &vertices, CRITICAL_SET_LIMIT)?;
    let mut best = (0u32, 0i64);
    for mask in 1..(1u32 << vertices.len()) {
        let value = dense.weight(mask) as i64 - dense.weight(dense.neighborhood(mask)) as i64;
        let better = value > best.1
            || (value == best.1
                && (mask.count_ones() < best.0.count_ones()
                    || (mask.count_ones() == best.0.count_ones() && lex_less(mask, best.0))));
        if better {
            best = (mask, value);
        }
    }
    Ok((dense.members(best.0), best.1))
}

/// `max { w(I) - w(N(I)) : I independent }`, the criticality restricted to
/// independent sets.
pub fn brute_force_independent_criticality(g: &WeightedGraph) -> Result<i64, OracleError> {
    let vertices: Vec<Vertex> = g.vertices().collect();
    let dense = Dense::new(g, &vertices, CRITICAL_SET_LIMIT)?;
    let mut best = 0i64;
    for mask in 1..(1u32 << vertices.len()) {
        if dense.independent(mask) {
            best = best.max(dense.weight(mask) as i64 - dense.weight(dense.neighborhood(mask)) as i64);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_picks_heaviest() {
        let g = WeightedGraph::from_edges(vec![5, 3, 2], &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let s = brute_force_mwis(&g).unwrap();
        assert_eq!((s.vertices, s.weight), (vec![0], 5));
    }

    #[test]
    fn c5_unit() {
        let g = WeightedGraph::from_edges(vec![1; 5], &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        assert_eq!(brute_force_mwis(&g).unwrap().weight, 2);
    }

    #[test]
    fn p4_tie_goes_to_smallest_ids() {
        // a, b, c, d = 1, 9, 9, 1: {a,c} and {b,d} both weigh 10
        let g = WeightedGraph::from_edges(vec![1, 9, 9, 1], &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let s = brute_force_mwis(&g).unwrap();
        assert_eq!((s.vertices, s.weight), (vec![0, 2], 10));
    }

    #[test]
    fn size_cap() {
        let g = WeightedGraph::new(vec![1; 25]).unwrap();
        assert_eq!(brute_force_mwis(&g), Err(OracleError::TooLarge { size: 25, limit: 24 }));
        let h = WeightedGraph::new(vec![1; 15]).unwrap();
        assert!(brute_force_critical_set(&h).is_err());
    }

    #[test]
    fn critical_set_examples() {
        let edge = WeightedGraph::from_edges(vec![5, 1], &[(0, 1)]).unwrap();
        assert_eq!(brute_force_critical_set(&edge).unwrap(), (vec![0], 4));

        let c4 = WeightedGraph::from_edges(vec![1; 4], &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert_eq!(brute_force_critical_set(&c4).unwrap(), (vec![], 0));

        let star = WeightedGraph::from_edges(vec![1, 2, 2, 2], &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(brute_force_critical_set(&star).unwrap(), (vec![1, 2, 3], 5));
    }

    #[test]
    fn empty_graph() {
        let g = WeightedGraph::new(vec![]).unwrap();
        let s = brute_force_mwis(&g).unwrap();
        assert_eq!(s.weight, 0);
        assert!(s.vertices.is_empty());
    }
}
