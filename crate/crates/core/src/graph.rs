//! Mutable vertex-weighted graph with an undo log.
//!
//! Vertices are dense `usize` ids. Removing a vertex only flips its alive flag
//! and unlinks it from its neighbours; its own adjacency list is kept as a
//! snapshot so the removal can be undone. Folded vertices are appended past the
//! current id range. Every mutation is logged, and [`WeightedGraph::rollback`]
//! replays the inverse events back to a [`Checkpoint`].

use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

pub type Vertex = usize;
pub type Weight = u64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {0} is out of range")]
    OutOfRange(Vertex),
    #[error("vertex {0} is not alive")]
    DeadVertex(Vertex),
    #[error("vertex weights must be at least 1")]
    ZeroWeight,
    #[error("self-loop on vertex {0}")]
    SelfLoop(Vertex),
    #[error("edge {0}-{1} already present")]
    DuplicateEdge(Vertex, Vertex),
    #[error("edge {0}-{1} not present")]
    MissingEdge(Vertex, Vertex),
    #[error("fold neighbour {0} is also consumed by the fold")]
    FoldOverlap(Vertex),
    #[error("checkpoint is stale or belongs to another graph state")]
    StaleCheckpoint,
}

/// One logged mutation. Replaying inverses in LIFO order restores the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EditEvent {
    RemoveVertex(Vertex),
    InsertVertex(Vertex),
    AddEdge(Vertex, Vertex),
    RemoveEdge(Vertex, Vertex),
    SetWeight { vertex: Vertex, previous: Weight },
}

/// Opaque rollback mark produced by [`WeightedGraph::checkpoint`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Checkpoint {
    id: u64,
    log_len: usize,
}

#[derive(Debug, Clone, Default)]
pub struct WeightedGraph {
    weights: Vec<Weight>,
    adjacency: Vec<Vec<Vertex>>,
    alive: Vec<bool>,
    alive_count: usize,
    edge_count: usize,
    log: Vec<EditEvent>,
    open_marks: Vec<Checkpoint>,
    next_mark: u64,
}

impl WeightedGraph {
    /// Edgeless graph on `weights.len()` vertices.
    pub fn new(weights: Vec<Weight>) -> Result<Self, GraphError> {
        if weights.contains(&0) {
            return Err(GraphError::ZeroWeight);
        }
        let n = weights.len();
        Ok(Self {
            weights,
            adjacency: vec![Vec::new(); n],
            alive: vec![true; n],
            alive_count: n,
            ..Self::default()
        })
    }

    /// Builds a graph from an edge list. Duplicate edges are an error.
    pub fn from_edges(weights: Vec<Weight>, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut g = Self::new(weights)?;
        let n = g.capacity();
        for &(u, v) in edges {
            if u >= n {
                return Err(GraphError::OutOfRange(u));
            }
            if v >= n {
                return Err(GraphError::OutOfRange(v));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            g.adjacency[u].push(v);
            g.adjacency[v].push(u);
        }
        for (v, list) in g.adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateEdge(v.min(w[0]), v.max(w[0])));
            }
        }
        g.edge_count = edges.len();
        Ok(g)
    }

    /// Number of vertex ids ever allocated (alive or not).
    pub fn capacity(&self) -> usize {
        self.weights.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.alive_count
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.alive_count == 0
    }

    pub fn is_alive(&self, v: Vertex) -> bool {
        self.alive.get(v).copied().unwrap_or(false)
    }

    /// Alive vertices in ascending id order.
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.alive.iter().enumerate().filter_map(|(v, &a)| a.then_some(v))
    }

    /// Sorted alive neighbours of an alive vertex.
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        debug_assert!(self.is_alive(v));
        &self.adjacency[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v].len()
    }

    pub fn weight(&self, v: Vertex) -> Weight {
        self.weights[v]
    }

    pub fn neighborhood_weight(&self, v: Vertex) -> Weight {
        self.adjacency[v].iter().map(|&u| self.weights[u]).sum()
    }

    pub fn total_weight(&self) -> Weight {
        self.vertices().map(|v| self.weights[v]).sum()
    }

    pub fn set_weight_of(&self, set: &[Vertex]) -> Weight {
        set.iter().map(|&v| self.weights[v]).sum()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        if !self.is_alive(u) || !self.is_alive(v) {
            return false;
        }
        let (a, b) = if self.adjacency[u].len() <= self.adjacency[v].len() { (u, v) } else { (v, u) };
        self.adjacency[a].binary_search(&b).is_ok()
    }

    /// True when no two vertices of `set` are adjacent.
    pub fn is_independent(&self, set: &[Vertex]) -> bool {
        self.find_conflict(set).is_none()
    }

    /// First edge with both endpoints in `set`, if any.
    pub fn find_conflict(&self, set: &[Vertex]) -> Option<(Vertex, Vertex)> {
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        for &v in &sorted {
            for &u in &self.adjacency[v] {
                if u > v && sorted.binary_search(&u).is_ok() {
                    return Some((v, u));
                }
            }
        }
        None
    }

    fn check_alive(&self, v: Vertex) -> Result<(), GraphError> {
        if v >= self.capacity() {
            Err(GraphError::OutOfRange(v))
        } else if !self.alive[v] {
            Err(GraphError::DeadVertex(v))
        } else {
            Ok(())
        }
    }

    pub fn remove_vertex(&mut self, v: Vertex) -> Result<(), GraphError> {
        self.check_alive(v)?;
        for i in 0..self.adjacency[v].len() {
            let u = self.adjacency[v][i];
            let list = &mut self.adjacency[u];
            let pos = list.binary_search(&v).expect("adjacency is symmetric");
            list.remove(pos);
        }
        self.edge_count -= self.adjacency[v].len();
        self.alive[v] = false;
        self.alive_count -= 1;
        self.log.push(EditEvent::RemoveVertex(v));
        Ok(())
    }

    /// Appends a fresh alive vertex adjacent to `neighbors`.
    pub fn insert_vertex(&mut self, weight: Weight, neighbors: &[Vertex]) -> Result<Vertex, GraphError> {
        if weight == 0 {
            return Err(GraphError::ZeroWeight);
        }
        let mut list = neighbors.to_vec();
        list.sort_unstable();
        list.dedup();
        for &u in &list {
            self.check_alive(u)?;
        }
        let v = self.capacity();
        for &u in &list {
            // v is the largest id, so pushing keeps the list sorted
            self.adjacency[u].push(v);
        }
        self.edge_count += list.len();
        self.weights.push(weight);
        self.adjacency.push(list);
        self.alive.push(true);
        self.alive_count += 1;
        self.log.push(EditEvent::InsertVertex(v));
        Ok(v)
    }

    /// Replaces `consumed` by a single new vertex of weight `new_weight`
    /// adjacent to `new_neighbors`.
    pub fn fold_into_new_vertex(
        &mut self,
        consumed: &[Vertex],
        new_weight: Weight,
        new_neighbors: &[Vertex],
    ) -> Result<Vertex, GraphError> {
        if new_weight == 0 {
            return Err(GraphError::ZeroWeight);
        }
        for &v in consumed {
            self.check_alive(v)?;
        }
        for &u in new_neighbors {
            self.check_alive(u)?;
            if consumed.contains(&u) {
                return Err(GraphError::FoldOverlap(u));
            }
        }
        for &v in consumed {
            self.remove_vertex(v)?;
        }
        self.insert_vertex(new_weight, new_neighbors)
    }

    pub fn add_edge(&mut self, u: Vertex, v: Vertex) -> Result<(), GraphError> {
        self.check_alive(u)?;
        self.check_alive(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        let pos_u = match self.adjacency[u].binary_search(&v) {
            Ok(_) => return Err(GraphError::DuplicateEdge(u.min(v), u.max(v))),
            Err(p) => p,
        };
        self.adjacency[u].insert(pos_u, v);
        let pos_v = self.adjacency[v].binary_search(&u).unwrap_err();
        self.adjacency[v].insert(pos_v, u);
        self.edge_count += 1;
        self.log.push(EditEvent::AddEdge(u, v));
        Ok(())
    }

    pub fn remove_edge(&mut self, u: Vertex, v: Vertex) -> Result<(), GraphError> {
        self.check_alive(u)?;
        self.check_alive(v)?;
        self.unlink(u, v).ok_or(GraphError::MissingEdge(u.min(v), u.max(v)))?;
        self.edge_count -= 1;
        self.log.push(EditEvent::RemoveEdge(u, v));
        Ok(())
    }

    fn unlink(&mut self, u: Vertex, v: Vertex) -> Option<()> {
        let pu = self.adjacency[u].binary_search(&v).ok()?;
        self.adjacency[u].remove(pu);
        let pv = self.adjacency[v].binary_search(&u).expect("adjacency is symmetric");
        self.adjacency[v].remove(pv);
        Some(())
    }

    pub fn set_weight(&mut self, v: Vertex, weight: Weight) -> Result<(), GraphError> {
        self.check_alive(v)?;
        if weight == 0 {
            return Err(GraphError::ZeroWeight);
        }
        let previous = std::mem::replace(&mut self.weights[v], weight);
        self.log.push(EditEvent::SetWeight { vertex: v, previous });
        Ok(())
    }

    pub fn checkpoint(&mut self) -> Checkpoint {
        let mark = Checkpoint { id: self.next_mark, log_len: self.log.len() };
        self.next_mark += 1;
        self.open_marks.push(mark);
        mark
    }

    /// Undoes every edit made since `mark`. Marks taken after `mark` are
    /// invalidated; `mark` itself is consumed.
    pub fn rollback(&mut self, mark: Checkpoint) -> Result<(), GraphError> {
        let pos = self
            .open_marks
            .iter()
            .rposition(|m| *m == mark)
            .ok_or(GraphError::StaleCheckpoint)?;
        self.open_marks.truncate(pos);
        while self.log.len() > mark.log_len {
            let event = self.log.pop().expect("log longer than mark");
            self.undo(event);
        }
        Ok(())
    }

    /// Drops the undo history when no checkpoint is outstanding.
    pub fn clear_log(&mut self) {
        if self.open_marks.is_empty() {
            self.log.clear();
        }
    }

    pub fn log_len(&self) -> usize {
        self.log.len()
    }

    fn undo(&mut self, event: EditEvent) {
        match event {
            EditEvent::RemoveVertex(v) => {
                for i in 0..self.adjacency[v].len() {
                    let u = self.adjacency[v][i];
                    let list = &mut self.adjacency[u];
                    let pos = list.binary_search(&v).unwrap_err();
                    list.insert(pos, v);
                }
                self.edge_count += self.adjacency[v].len();
                self.alive[v] = true;
                self.alive_count += 1;
            }
            EditEvent::InsertVertex(v) => {
                debug_assert_eq!(v + 1, self.capacity());
                let list = self.adjacency.pop().expect("inserted vertex present");
                for &u in &list {
                    let popped = self.adjacency[u].pop();
                    debug_assert_eq!(popped, Some(v));
                }
                self.edge_count -= list.len();
                self.weights.pop();
                self.alive.pop();
                self.alive_count -= 1;
            }
            EditEvent::AddEdge(u, v) => {
                self.unlink(u, v).expect("edge added earlier");
                self.edge_count -= 1;
            }
            EditEvent::RemoveEdge(u, v) => {
                let pu = self.adjacency[u].binary_search(&v).unwrap_err();
                self.adjacency[u].insert(pu, v);
                let pv = self.adjacency[v].binary_search(&u).unwrap_err();
                self.adjacency[v].insert(pv, u);
                self.edge_count += 1;
            }
            EditEvent::SetWeight { vertex, previous } => self.weights[vertex] = previous,
        }
    }

    /// Partition of the alive vertices into connected components, each sorted,
    /// ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<Vertex>> {
        let mut seen = vec![false; self.capacity()];
        let mut components = Vec::new();
        let mut queue = VecDeque::new();
        for s in self.vertices() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            queue.push_back(s);
            let mut comp = Vec::new();
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for &u in &self.adjacency[v] {
                    if !seen[u] {
                        seen[u] = true;
                        queue.push_back(u);
                    }
                }
            }
            comp.sort_unstable();
            components.push(comp);
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        let Some(s) = self.vertices().next() else { return true };
        let mut seen = vec![false; self.capacity()];
        let mut stack = vec![s];
        seen[s] = true;
        let mut count = 0;
        while let Some(v) = stack.pop() {
            count += 1;
            for &u in &self.adjacency[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        count == self.alive_count
    }

    /// Induced subgraph on `vertices` (alive, any order) as a fresh graph
    /// whose vertex `i` corresponds to `map[i]`.
    pub fn induced_subgraph(&self, vertices: &[Vertex]) -> (WeightedGraph, Vec<Vertex>) {
        let mut map = vertices.to_vec();
        map.sort_unstable();
        map.dedup();
        let mut local = vec![usize::MAX; self.capacity()];
        for (i, &v) in map.iter().enumerate() {
            local[v] = i;
        }
        let mut sub = WeightedGraph {
            weights: map.iter().map(|&v| self.weights[v]).collect(),
            adjacency: Vec::with_capacity(map.len()),
            alive: vec![true; map.len()],
            alive_count: map.len(),
            ..Self::default()
        };
        let mut directed = 0;
        for &v in &map {
            let list: Vec<Vertex> = self.adjacency[v]
                .iter()
                .filter_map(|&u| (local[u] != usize::MAX).then_some(local[u]))
                .collect();
            directed += list.len();
            sub.adjacency.push(list);
        }
        sub.edge_count = directed / 2;
        (sub, map)
    }

    /// One line per alive vertex: `id weight neighbours...`. Used for state
    /// equality checks.
    pub fn canonical_serialization(&self) -> String {
        let mut out = String::new();
        for v in self.vertices() {
            write!(out, "{} {}", v, self.weights[v]).unwrap();
            for &u in &self.adjacency[v] {
                write!(out, " {u}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Verifies symmetry, sortedness, positivity and that no alive list
    /// mentions a dead vertex.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut directed = 0;
        let mut alive = 0;
        for v in self.vertices() {
            alive += 1;
            if self.weights[v] == 0 {
                return Err(format!("vertex {v} has weight 0"));
            }
            let list = &self.adjacency[v];
            directed += list.len();
            for w in list.windows(2) {
                if w[0] >= w[1] {
                    return Err(format!("adjacency of {v} not strictly sorted"));
                }
            }
            for &u in list {
                if u == v {
                    return Err(format!("self-loop at {v}"));
                }
                if !self.is_alive(u) {
                    return Err(format!("alive {v} lists dead {u}"));
                }
                if self.adjacency[u].binary_search(&v).is_err() {
                    return Err(format!("edge {v}-{u} not symmetric"));
                }
            }
        }
        if alive != self.alive_count {
            return Err("alive count out of sync".into());
        }
        if directed != 2 * self.edge_count {
            return Err("edge count out of sync".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> WeightedGraph {
        WeightedGraph::from_edges(vec![1, 1, 1], &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    fn edges_of(g: &WeightedGraph) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::new();
        for v in g.vertices() {
            out.extend(g.neighbors(v).iter().filter(|&&u| u > v).map(|&u| (v, u)));
        }
        out
    }

    #[test]
    fn remove_from_triangle() {
        let mut g = triangle();
        g.remove_vertex(0).unwrap();
        assert_eq!(edges_of(&g), vec![(1, 2)]);
        assert!(!g.is_alive(0));
        g.check_invariants().unwrap();
    }

    #[test]
    fn remove_only_vertex() {
        let mut g = WeightedGraph::new(vec![4]).unwrap();
        g.remove_vertex(0).unwrap();
        assert!(g.is_empty());
        assert_eq!(g.canonical_serialization(), "");
    }

    #[test]
    fn remove_path_middle() {
        let mut g = WeightedGraph::from_edges(vec![1, 1, 1], &[(0, 1), (1, 2)]).unwrap();
        g.remove_vertex(1).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.connected_components(), vec![vec![0], vec![2]]);
    }

    #[test]
    fn remove_errors() {
        let mut g = triangle();
        assert_eq!(g.remove_vertex(7), Err(GraphError::OutOfRange(7)));
        g.remove_vertex(1).unwrap();
        assert_eq!(g.remove_vertex(1), Err(GraphError::DeadVertex(1)));
    }

    #[test]
    fn fold_path_to_single_vertex() {
        let mut g = WeightedGraph::from_edges(vec![2, 3, 2], &[(0, 1), (1, 2)]).unwrap();
        let v = g.fold_into_new_vertex(&[0, 1, 2], 1, &[]).unwrap();
        assert_eq!(v, 3);
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.weight(v), 1);
        assert!(g.neighbors(v).is_empty());
    }

    #[test]
    fn fold_star_wires_second_neighbourhood() {
        // v=0, leaves a=1, b=2, c=3 hangs off a and is the only vertex at distance 2
        let mut g = WeightedGraph::from_edges(vec![3, 2, 2, 1], &[(0, 1), (0, 2), (1, 3)]).unwrap();
        let folded = g.fold_into_new_vertex(&[0, 1, 2], 1, &[3]).unwrap();
        assert_eq!(g.neighbors(folded), &[3]);
        assert_eq!(g.neighbors(3), &[folded]);
        g.check_invariants().unwrap();
    }

    #[test]
    fn fold_rejects_overlap_and_zero_weight() {
        let mut g = triangle();
        assert_eq!(g.fold_into_new_vertex(&[0, 1], 1, &[1, 2]), Err(GraphError::FoldOverlap(1)));
        assert_eq!(g.fold_into_new_vertex(&[0, 1], 0, &[2]), Err(GraphError::ZeroWeight));
        // rejected folds leave the graph untouched
        assert_eq!(g.canonical_serialization(), triangle().canonical_serialization());
    }

    #[test]
    fn rollback_removals() {
        let mut g = WeightedGraph::from_edges(vec![1, 2, 3, 4, 5], &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)])
            .unwrap();
        let before = g.canonical_serialization();
        let mark = g.checkpoint();
        g.remove_vertex(2).unwrap();
        g.remove_vertex(0).unwrap();
        g.remove_vertex(4).unwrap();
        g.rollback(mark).unwrap();
        assert_eq!(g.canonical_serialization(), before);
        g.check_invariants().unwrap();
    }

    #[test]
    fn rollback_fold_and_weights() {
        let mut g = WeightedGraph::from_edges(vec![2, 3, 2, 9], &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let before = g.canonical_serialization();
        let mark = g.checkpoint();
        let v = g.fold_into_new_vertex(&[0, 1, 2], 1, &[3]).unwrap();
        g.set_weight(3, 4).unwrap();
        g.set_weight(v, 7).unwrap();
        g.rollback(mark).unwrap();
        assert_eq!(g.canonical_serialization(), before);
        assert_eq!(g.capacity(), 4);
    }

    #[test]
    fn nested_checkpoints_unwind_lifo() {
        let mut g = WeightedGraph::from_edges(vec![1, 1, 1, 1], &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let s0 = g.canonical_serialization();
        let outer = g.checkpoint();
        g.remove_vertex(0).unwrap();
        let s1 = g.canonical_serialization();
        let inner = g.checkpoint();
        g.add_edge(1, 3).unwrap();
        g.remove_edge(1, 2).unwrap();
        g.rollback(inner).unwrap();
        assert_eq!(g.canonical_serialization(), s1);
        g.rollback(outer).unwrap();
        assert_eq!(g.canonical_serialization(), s0);
    }

    #[test]
    fn stale_checkpoint_rejected() {
        let mut g = triangle();
        let outer = g.checkpoint();
        let inner = g.checkpoint();
        g.rollback(outer).unwrap();
        assert_eq!(g.rollback(inner), Err(GraphError::StaleCheckpoint));
        assert_eq!(g.rollback(outer), Err(GraphError::StaleCheckpoint));
    }

    #[test]
    fn components_of_two_edges_and_empty() {
        let g = WeightedGraph::from_edges(vec![1; 4], &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(g.connected_components(), vec![vec![0, 1], vec![2, 3]]);
        let e = WeightedGraph::new(vec![]).unwrap();
        assert!(e.connected_components().is_empty());
    }

    #[test]
    fn induced_subgraph_maps_ids() {
        let g = WeightedGraph::from_edges(vec![1, 2, 3, 4], &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let (sub, map) = g.induced_subgraph(&[3, 1, 2]);
        assert_eq!(map, vec![1, 2, 3]);
        assert_eq!(sub.edge_count(), 2);
        assert_eq!(sub.weight(0), 2);
        assert_eq!(sub.neighbors(1), &[0, 2]);
        sub.check_invariants().unwrap();
    }
}
