//! The individual reduction rules. Each returns whether it changed the graph.

use crate::graph::{Vertex, WeightedGraph};
use crate::oracle;

use super::{critical_set, Lift, RecordKind, Reducer, Rule};

/// `|a ∩ b|` for sorted slices.
fn intersection_size(a: &[Vertex], b: &[Vertex]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Whether the open neighbourhood of `v` is a clique.
pub(crate) fn neighborhood_is_clique(g: &WeightedGraph, v: Vertex) -> bool {
    let nv = g.neighbors(v);
    nv.iter().all(|&u| g.degree(u) + 1 >= nv.len() && intersection_size(g.neighbors(u), nv) + 1 == nv.len())
}

/// Whether no two neighbours of `v` are adjacent.
pub(crate) fn neighborhood_is_independent(g: &WeightedGraph, v: Vertex) -> bool {
    let nv = g.neighbors(v);
    nv.iter().all(|&u| intersection_size(g.neighbors(u), nv) == 0)
}

/// `N[v] ⊆ N[u]` for adjacent `u`, `v`.
fn closed_neighborhood_contains(g: &WeightedGraph, u: Vertex, v: Vertex) -> bool {
    if g.degree(u) < g.degree(v) {
        return false;
    }
    let nu = g.neighbors(u);
    // every neighbour of v other than u must also neighbour u
    g.neighbors(v).iter().filter(|&&x| x != u).all(|x| nu.binary_search(x).is_ok())
}

impl Reducer {
    /// `w(v) >= w(N(v))`: `v` is in some maximum weight independent set.
    pub fn neighborhood_removal(&mut self, g: &mut WeightedGraph, v: Vertex) -> bool {
        if g.weight(v) < g.neighborhood_weight(v) {
            return false;
        }
        self.take(g, RecordKind::Reduction(Rule::NeighborhoodRemoval), vec![v]);
        true
    }

    /// Removes `u ∈ N(v)` when `α_w(G[N(v) \ N[u]]) + w(u) <= w(v)`. The local
    /// subproblem is solved exactly if it has at most `max_meta_size`
    /// vertices; otherwise the rule does not apply.
    pub fn neighbor_removal_meta(&mut self, g: &mut WeightedGraph, v: Vertex, u: Vertex) -> bool {
        if !g.is_alive(v) || !g.has_edge(u, v) || g.weight(u) > g.weight(v) {
            return false;
        }
        let nu = g.neighbors(u);
        let rest: Vec<Vertex> =
            g.neighbors(v).iter().copied().filter(|&x| x != u && nu.binary_search(&x).is_err()).collect();
        let budget = g.weight(v) - g.weight(u);
        let fits = if g.set_weight_of(&rest) <= budget {
            true
        } else if rest.len() <= self.max_meta_size {
            oracle::max_weight_induced(g, &rest, self.max_meta_size).expect("within cap") <= budget
        } else {
            false
        };
        if fits {
            self.discard(g, RecordKind::Reduction(Rule::NeighborRemoval), u);
        }
        fits
    }

    pub(crate) fn neighbor_removal_at(&mut self, g: &mut WeightedGraph, v: Vertex) -> bool {
        let candidates: Vec<Vertex> = g.neighbors(v).to_vec();
        let mut applied = false;
        for u in candidates {
            if g.is_alive(u) && self.neighbor_removal_meta(g, v, u) {
                applied = true;
            }
        }
        applied
    }

    /// `N(v)` independent, `w(N(v)) > w(v)` and `w(N(v)) - min_{u∈N(v)} w(u) < w(v)`:
    /// fold `N[v]` into one vertex of weight `w(N(v)) - w(v)`.
    pub fn neighborhood_folding(&mut self, g: &mut WeightedGraph, v: Vertex) -> bool {
        let nv = g.neighbors(v);
        if nv.is_empty() || nv.len() > self.max_meta_size {
            return false;
        }
        let total = g.neighborhood_weight(v);
        let lightest = nv.iter().map(|&u| g.weight(u)).min().unwrap_or(0);
        let wv = g.weight(v);
        if total <= wv || total - lightest >= wv || !neighborhood_is_independent(g, v) {
            return false;
        }
        let nbrs = nv.to_vec();
        self.fold(g, Rule::NeighborhoodFolding, vec![v], nbrs);
        true
    }

    /// Simplicial `v` at least as heavy as each neighbour joins the solution.
    pub fn isolated_vertex_removal(&mut self, g: &mut WeightedGraph, v: Vertex) -> bool {
        if self.clique_degree_limit.is_some_and(|d| g.degree(v) > d) {
            return false;
        }
        let wv = g.weight(v);
        if g.neighbors(v).iter().any(|&u| g.weight(u) > wv) || !neighborhood_is_clique(g, v) {
            return false;
        }
        self.take(g, RecordKind::Reduction(Rule::IsolatedVertex), vec![v]);
        true
    }

    /// Simplicial `v` heavier than every simplicial neighbour: drop the
    /// neighbours no heavier than `v`, drop `v`, and charge `w(v)` to the
    /// remaining neighbours.
    pub fn isolated_weight_transfer(&mut self, g: &mut WeightedGraph, v: Vertex) -> bool {
        if self.clique_degree_limit.is_some_and(|d| g.degree(v) > d) {
            return false;
        }
        let wv = g.weight(v);
        if !neighborhood_is_clique(g, v) {
            return false;
        }
        // only heavier neighbours can violate the condition on simplicial neighbours
        if g.neighbors(v).iter().any(|&u| g.weight(u) > wv && neighborhood_is_clique(g, u)) {
            return false;
        }
        let (removed, remaining): (Vec<Vertex>, Vec<Vertex>) =
            g.neighbors(v).iter().partition(|&&u| g.weight(u) <= wv);
        for &u in &removed {
            self.remove(g, u);
        }
        self.remove(g, v);
        for &x in &remaining {
            let w = g.weight(x) - wv;
            self.reweight(g, x, w);
        }
        let mut consumed = removed;
        consumed.push(v);
        consumed.sort_unstable();
        self.push(
            RecordKind::Reduction(Rule::WeightTransfer),
            wv,
            consumed,
            None,
            Lift::Transfer { vertex: v, guard: remaining },
        );
        true
    }

    /// Degree-2 `v` with non-adjacent neighbours `u`, `x`, where
    /// `max(w(u), w(x)) <= w(v) < w(u) + w(x)`: fold `{u, v, x}`.
    pub fn weighted_vertex_folding(&mut self, g: &mut WeightedGraph, v: Vertex) -> bool {
        if g.degree(v) != 2 {
            return false;
        }
        let (u, x) = (g.neighbors(v)[0], g.neighbors(v)[1]);
        let (wu, wv, wx) = (g.weight(u), g.weight(v), g.weight(x));
        if wv >= wu + wx || wv < wu.max(wx) || g.has_edge(u, x) {
            return false;
        }
        self.fold(g, Rule::VertexFolding, vec![v], vec![u, x]);
        true
    }

    /// Non-adjacent `u`, `v` with the same independent neighbourhood
    /// `{p, q, r}`.
    pub fn weighted_twin(&mut self, g: &mut WeightedGraph, u: Vertex, v: Vertex) -> bool {
        if u == v || !g.is_alive(u) || !g.is_alive(v) || g.degree(u) != 3 || g.neighbors(u) != g.neighbors(v) {
            return false;
        }
        if !neighborhood_is_independent(g, u) {
            return false;
        }
        let pqr = g.neighbors(u).to_vec();
        let pair = if u < v { vec![u, v] } else { vec![v, u] };
        let w_pair = g.set_weight_of(&pair);
        let w_pqr = g.set_weight_of(&pqr);
        let lightest = pqr.iter().map(|&p| g.weight(p)).min().unwrap();
        if w_pair >= w_pqr {
            self.take(g, RecordKind::Reduction(Rule::Twin), pair);
            true
        } else if w_pair > w_pqr - lightest {
            self.fold(g, Rule::Twin, pair, pqr);
            true
        } else {
            false
        }
    }

    pub(crate) fn twin_at(&mut self, g: &mut WeightedGraph, u: Vertex) -> bool {
        if g.degree(u) != 3 {
            return false;
        }
        let nu = g.neighbors(u);
        let pivot = *nu.iter().min_by_key(|&&p| (g.degree(p), p)).unwrap();
        let twin = g
            .neighbors(pivot)
            .iter()
            .copied()
            .filter(|&v| v != u && g.degree(v) == 3 && g.neighbors(v) == nu)
            .min();
        match twin {
            Some(v) => self.weighted_twin(g, u, v),
            None => false,
        }
    }

    /// `N[u] ⊇ N[v]` and `w(u) <= w(v)`: some optimum avoids `u`.
    pub fn weighted_domination(&mut self, g: &mut WeightedGraph, u: Vertex, v: Vertex) -> bool {
        if !g.has_edge(u, v) || g.weight(u) > g.weight(v) || !closed_neighborhood_contains(g, u, v) {
            return false;
        }
        self.discard(g, RecordKind::Reduction(Rule::Domination), u);
        true
    }

    /// Removes every neighbour that dominates `v`, lowest id first.
    pub(crate) fn domination_at(&mut self, g: &mut WeightedGraph, v: Vertex) -> bool {
        let candidates = g.neighbors(v).to_vec();
        let mut applied = false;
        for u in candidates {
            if g.is_alive(u) && self.weighted_domination(g, u, v) {
                applied = true;
            }
        }
        applied
    }

    /// Global rule: force in the independent core of a critical weighted set.
    pub fn critical_set_reduction(&mut self, g: &mut WeightedGraph) -> bool {
        if g.is_empty() {
            return false;
        }
        let critical = critical_set(g).expect("integral min cut always certifies");
        if critical.value <= 0 || critical.independent.is_empty() {
            return false;
        }
        self.take(g, RecordKind::Reduction(Rule::CriticalSet), critical.independent);
        self.counts.0[Rule::CriticalSet.index()] += 1;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Weight;
    use crate::oracle::brute_force_mwis;
    use crate::reduce::lift_solution;

    fn reducer(g: &WeightedGraph) -> Reducer {
        Reducer::new(g)
    }

    /// Checks `α(before) = α(after) + offset` and that lifting an optimum of
    /// the reduced graph gives an optimum of the original.
    fn assert_safe(before: &WeightedGraph, after: &WeightedGraph, r: &Reducer) {
        let alpha = brute_force_mwis(before).unwrap().weight;
        let kernel = brute_force_mwis(after).unwrap();
        assert_eq!(alpha, kernel.weight + r.offset(), "offset mismatch");
        let lifted = lift_solution(&kernel.vertices, r.stack()).unwrap();
        assert!(before.is_independent(&lifted));
        assert_eq!(before.set_weight_of(&lifted), alpha);
    }

    fn graph(weights: &[Weight], edges: &[(Vertex, Vertex)]) -> WeightedGraph {
        WeightedGraph::from_edges(weights.to_vec(), edges).unwrap()
    }

    #[test]
    fn neighborhood_removal_star() {
        let mut g = graph(&[10, 3, 3, 3], &[(0, 1), (0, 2), (0, 3)]);
        let mut r = reducer(&g);
        assert!(r.neighborhood_removal(&mut g, 0));
        assert_eq!(r.offset(), 10);
        assert!(g.is_empty());
    }

    #[test]
    fn neighborhood_removal_isolated_and_triangle() {
        let mut g = graph(&[5], &[]);
        let mut r = reducer(&g);
        assert!(r.neighborhood_removal(&mut g, 0));
        assert_eq!(r.offset(), 5);

        let orig = graph(&[5, 2, 2], &[(0, 1), (1, 2), (0, 2)]);
        let mut g = orig.clone();
        let mut r = reducer(&g);
        assert!(r.neighborhood_removal(&mut g, 0));
        assert_safe(&orig, &g, &r);
        assert_eq!(r.offset(), 5);
    }

    #[test]
    fn neighbor_removal_examples() {
        // v=0 (6), u=1 (2) adjacent to all of N(v) = {1,2,3}
        let orig = graph(&[6, 2, 3, 3], &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]);
        let mut g = orig.clone();
        let mut r = reducer(&g);
        assert!(r.neighbor_removal_meta(&mut g, 0, 1));
        assert!(!g.is_alive(1));
        assert_safe(&orig, &g, &r);

        // v=0 (4), u=1 (1), N(v)\N[u] = {2} of weight 2
        let orig = graph(&[4, 1, 2], &[(0, 1), (0, 2)]);
        let mut g = orig.clone();
        let mut r = reducer(&g);
        assert!(r.neighbor_removal_meta(&mut g, 0, 1));
        assert_safe(&orig, &g, &r);

        // v=0 (3), u=1 (2), local optimum 2
        let mut g = graph(&[3, 2, 2], &[(0, 1), (0, 2)]);
        let mut r = reducer(&g);
        assert!(!r.neighbor_removal_meta(&mut g, 0, 1));
    }

    #[test]
    fn neighborhood_folding_examples() {
        let orig = graph(&[2, 3, 2], &[(0, 1), (1, 2)]);
        let mut g = orig.clone();
        let mut r = reducer(&g);
        assert!(r.neighborhood_folding(&mut g, 1));
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.weight(3), 1);
        assert_eq!(r.offset(), 3);
        assert_safe(&orig, &g, &r);
        assert_eq!(brute_force_mwis(&orig).unwrap().weight, 4);

        let mut g = graph(&[1, 5, 1], &[(0, 1), (1, 2)]);
        assert!(!reducer(&g).neighborhood_folding(&mut g, 1));

        let mut g = graph(&[4, 3, 4], &[(0, 1), (1, 2)]);
        assert!(!reducer(&g).neighborhood_folding(&mut g, 1));
    }

    #[test]
    fn isolated_vertex_examples() {
        let orig = graph(&[5, 3, 2], &[(0, 1), (1, 2), (0, 2)]);
        let mut g = orig.clone();
        let mut r = reducer(&g);
        assert!(r.isolated_vertex_removal(&mut g, 0));
        assert_eq!(r.offset(), 5);
        assert_safe(&orig, &g, &r);

        let edges: Vec<_> = (0..4).flat_map(|a| (a + 1..4).map(move |b| (a, b))).collect();
        for v in 0..4 {
            let mut g = graph(&[7; 4], &edges);
            let mut r = reducer(&g);
            assert!(r.isolated_vertex_removal(&mut g, v));
            assert_eq!(r.offset(), 7);
        }

        let mut g = graph(&[5, 6, 2], &[(0, 1), (1, 2), (0, 2)]);
        assert!(!reducer(&g).isolated_vertex_removal(&mut g, 0));
    }

    #[test]
    fn weight_transfer_example() {
        // clique {v=0, a=1, b=2}, b also adjacent to c=3
        let orig = graph(&[4, 3, 6, 5], &[(0, 1), (0, 2), (1, 2), (2, 3)]);
        let mut g = orig.clone();
        let mut r = reducer(&g);
        assert!(r.isolated_weight_transfer(&mut g, 0));
        assert!(!g.is_alive(0) && !g.is_alive(1));
        assert_eq!(g.weight(2), 2);
        assert_eq!(r.offset(), 4);
        assert_safe(&orig, &g, &r);
    }

    #[test]
    fn weight_transfer_degenerate_and_blocked() {
        let orig = graph(&[5, 3, 2], &[(0, 1), (1, 2), (0, 2)]);
        let mut g = orig.clone();
        let mut r = reducer(&g);
        assert!(r.isolated_weight_transfer(&mut g, 0));
        assert!(g.is_empty());
        assert_safe(&orig, &g, &r);

        // neighbour 1 is simplicial and heavier
        let mut g = graph(&[4, 6, 3], &[(0, 1), (0, 2), (1, 2)]);
        assert!(!reducer(&g).isolated_weight_transfer(&mut g, 0));
    }

    #[test]
    fn vertex_folding_examples() {
        let orig = graph(&[2, 3, 2], &[(0, 1), (1, 2)]);
        let mut g = orig.clone();
        let mut r = reducer(&g);
        assert!(r.weighted_vertex_folding(&mut g, 1));
        assert_eq!(g.weight(3), 1);
        assert_safe(&orig, &g, &r);

        let mut g = graph(&[4, 3, 2], &[(0, 1), (1, 2)]);
        assert!(!reducer(&g).weighted_vertex_folding(&mut g, 1));

        let orig = graph(&[2, 3, 2, 3], &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let mut g = orig.clone();
        let mut r = reducer(&g);
        assert!(r.weighted_vertex_folding(&mut g, 1));
        assert_safe(&orig, &g, &r);
    }

    fn twin_gadget(pair: [Weight; 2], pqr: [Weight; 3]) -> WeightedGraph {
        // u=0, v=1, p,q,r = 2,3,4; fringe 5 hangs off p and 6 off r
        graph(
            &[pair[0], pair[1], pqr[0], pqr[1], pqr[2], 4, 4],
            &[(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 5), (4, 6)],
        )
    }

    #[test]
    fn twin_cases() {
        let orig = twin_gadget([5, 5], [3, 3, 3]);
        let mut g = orig.clone();
        let mut r = reducer(&g);
        assert!(r.weighted_twin(&mut g, 0, 1));
        assert_eq!(r.offset(), 10);
        assert_safe(&orig, &g, &r);

        let orig = twin_gadget([3, 4], [3, 3, 3]);
        let mut g = orig.clone();
        let mut r = reducer(&g);
        assert!(r.weighted_twin(&mut g, 0, 1));
        assert_eq!(g.weight(7), 2);
        assert_eq!(g.neighbors(7), &[5, 6]);
        assert_safe(&orig, &g, &r);

        let mut g = twin_gadget([2, 2], [3, 3, 3]);
        assert!(!reducer(&g).weighted_twin(&mut g, 0, 1));
    }

    #[test]
    fn domination_examples() {
        // u=0 (2) adjacent to v=1 (3) and x=2; N[v] = {u, v}
        let orig = graph(&[2, 3, 1], &[(0, 1), (0, 2)]);
        let mut g = orig.clone();
        let mut r = reducer(&g);
        assert!(r.weighted_domination(&mut g, 0, 1));
        assert!(!g.is_alive(0));
        assert_safe(&orig, &g, &r);

        // equal-weight true twins: scanning the lower id removes the higher one
        let mut g = graph(&[4, 4, 1], &[(0, 1), (0, 2), (1, 2)]);
        let mut r = reducer(&g);
        assert!(r.domination_at(&mut g, 0));
        assert!(g.is_alive(0) && !g.is_alive(1));

        let mut g = graph(&[5, 3, 1], &[(0, 1), (0, 2)]);
        assert!(!reducer(&g).weighted_domination(&mut g, 0, 1));
    }

    #[test]
    fn critical_set_examples() {
        let orig = graph(&[5, 1], &[(0, 1)]);
        let mut g = orig.clone();
        let mut r = reducer(&g);
        assert!(r.critical_set_reduction(&mut g));
        assert_eq!(r.offset(), 5);
        assert_eq!(r.stack()[0].lift, Lift::Take(vec![0]));

        let mut g = graph(&[1; 4], &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert!(!reducer(&g).critical_set_reduction(&mut g));

        let orig = graph(&[1, 2, 2, 2], &[(0, 1), (0, 2), (0, 3)]);
        let mut g = orig.clone();
        let mut r = reducer(&g);
        assert!(r.critical_set_reduction(&mut g));
        assert_eq!(r.offset(), 6);
        assert_safe(&orig, &g, &r);
    }
}
