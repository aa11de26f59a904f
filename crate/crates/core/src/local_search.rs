//! Weighted iterated local search.
//!
//! The current solution is always a maximal independent set. Improvement
//! moves are (ω,1)-swaps (insert a vertex heavier than its solution
//! neighbours) and weighted (1,2)-swaps (replace a solution vertex by two
//! non-adjacent neighbours that only conflict with it). Each iteration
//! force-inserts `k` vertices around a random one, runs the moves to a local
//! optimum (the forced vertices stay fixed for the first pass), and
//! reverts if the result is lighter. `k` doubles after every
//! [`STALL_STEP`] iterations without a new best and drops back to 1 on
//! improvement or when it exceeds [`MAX_PERTURBATION`].

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Vertex, Weight, WeightedGraph};
use crate::solution::Solution;

pub const STALL_STEP: u64 = 100;
pub const MAX_PERTURBATION: usize = 64;

/// Stop after whichever limit is reached first. At least one must be set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IlsBudget {
    pub max_iterations: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl IlsBudget {
    pub fn iterations(n: u64) -> Self {
        Self { max_iterations: Some(n), time_limit: None }
    }

    pub fn time(limit: Duration) -> Self {
        Self { max_iterations: None, time_limit: Some(limit) }
    }
}

/// A new best weight found `elapsed` seconds after the run started.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergencePoint {
    pub elapsed: f64,
    pub weight: Weight,
}

#[derive(Debug, Clone)]
pub struct IlsOutcome {
    pub solution: Solution,
    pub convergence: Vec<ConvergencePoint>,
    pub iterations: u64,
}

pub struct LsState<'g> {
    g: &'g WeightedGraph,
    vertices: Vec<Vertex>,
    in_solution: Vec<bool>,
    /// Number of solution neighbours.
    tightness: Vec<u32>,
    /// Total weight of solution neighbours.
    pressure: Vec<Weight>,
    weight: Weight,
    locked: Vec<bool>,
    queue: VecDeque<Vertex>,
    queued: Vec<bool>,
    undo: Vec<(Vertex, bool)>,
    rng: ChaCha8Rng,
}

impl<'g> LsState<'g> {
    /// Starts from the greedy maximal independent set.
    pub fn new(g: &'g WeightedGraph, seed: u64) -> Self {
        let n = g.capacity();
        let mut state = Self {
            g,
            vertices: g.vertices().collect(),
            in_solution: vec![false; n],
            tightness: vec![0; n],
            pressure: vec![0; n],
            weight: 0,
            locked: vec![false; n],
            queue: VecDeque::new(),
            queued: vec![false; n],
            undo: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        };
        let all = state.vertices.clone();
        state.fill_free(all);
        state
    }

    pub fn weight(&self) -> Weight {
        self.weight
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.in_solution[v]
    }

    pub fn solution(&self) -> Solution {
        let vertices = self.vertices.iter().copied().filter(|&v| self.in_solution[v]).collect();
        Solution { vertices, weight: self.weight, optimal: false }
    }

    /// Independence and maximality of the current solution.
    pub fn is_valid(&self) -> bool {
        self.vertices.iter().all(|&v| {
            let sol_nbrs = self.g.neighbors(v).iter().filter(|&&u| self.in_solution[u]).count();
            sol_nbrs as u32 == self.tightness[v]
                && if self.in_solution[v] { sol_nbrs == 0 } else { sol_nbrs > 0 }
        })
    }

    fn enqueue(&mut self, v: Vertex) {
        if !self.queued[v] {
            self.queued[v] = true;
            self.queue.push_back(v);
        }
    }

    fn insert(&mut self, v: Vertex) {
        debug_assert!(!self.in_solution[v] && self.tightness[v] == 0);
        self.in_solution[v] = true;
        self.weight += self.g.weight(v);
        self.undo.push((v, true));
        let wv = self.g.weight(v);
        for &u in self.g.neighbors(v) {
            self.tightness[u] += 1;
            self.pressure[u] += wv;
        }
        self.enqueue(v);
    }

    fn remove(&mut self, v: Vertex) {
        debug_assert!(self.in_solution[v]);
        self.in_solution[v] = false;
        self.weight -= self.g.weight(v);
        self.undo.push((v, false));
        let wv = self.g.weight(v);
        let g = self.g;
        for &u in g.neighbors(v) {
            self.tightness[u] -= 1;
            self.pressure[u] -= wv;
            self.enqueue(u);
            if self.tightness[u] == 1 {
                // u now conflicts with a single solution vertex, a (1,2) candidate
                if let Some(&s) = g.neighbors(u).iter().find(|&&s| self.in_solution[s]) {
                    self.enqueue(s);
                }
            }
        }
    }

    /// Inserts every free vertex among `candidates`, heaviest first.
    fn fill_free(&mut self, mut candidates: Vec<Vertex>) {
        candidates.retain(|&v| !self.in_solution[v] && self.tightness[v] == 0);
        candidates.sort_by(|&a, &b| self.g.weight(b).cmp(&self.g.weight(a)).then(a.cmp(&b)));
        candidates.dedup();
        for v in candidates {
            if !self.in_solution[v] && self.tightness[v] == 0 {
                self.insert(v);
            }
        }
    }

    fn solution_neighbors(&self, v: Vertex) -> Vec<Vertex> {
        self.g.neighbors(v).iter().copied().filter(|&u| self.in_solution[u]).collect()
    }

    /// Inserts `v` if it outweighs its solution neighbours, evicting them
    /// and refilling the freed area greedily.
    pub fn omega_one_swap(&mut self, v: Vertex) -> bool {
        if self.in_solution[v] || self.g.weight(v) <= self.pressure[v] {
            return false;
        }
        let evicted = self.solution_neighbors(v);
        if evicted.iter().any(|&u| self.locked[u]) {
            return false;
        }
        self.force_insert(v, &evicted);
        true
    }

    fn force_insert(&mut self, v: Vertex, evicted: &[Vertex]) {
        for &u in evicted {
            self.remove(u);
        }
        self.insert(v);
        let g = self.g;
        let freed: Vec<Vertex> = evicted.iter().flat_map(|&u| g.neighbors(u).iter().copied()).collect();
        self.fill_free(freed);
    }

    /// Best pair `a, b` of non-adjacent neighbours of solution vertex `v`
    /// that conflict only with `v` and together outweigh it. Ties go to the
    /// lexicographically smallest id pair.
    pub fn best_one_two_pair(&self, v: Vertex) -> Option<(Vertex, Vertex)> {
        if !self.in_solution[v] {
            return None;
        }
        let g = self.g;
        let mut free: Vec<Vertex> =
            g.neighbors(v).iter().copied().filter(|&u| self.tightness[u] == 1).collect();
        if free.len() < 2 {
            return None;
        }
        free.sort_by(|&a, &b| g.weight(b).cmp(&g.weight(a)).then(a.cmp(&b)));
        let mut best: Option<(Weight, Vertex, Vertex)> = None;
        let threshold = g.weight(v);
        for i in 0..free.len() {
            let a = free[i];
            for &b in &free[i + 1..] {
                let sum = g.weight(a) + g.weight(b);
                if sum <= threshold || best.is_some_and(|(s, _, _)| sum < s) {
                    break;
                }
                if g.has_edge(a, b) {
                    continue;
                }
                let pair = (a.min(b), a.max(b));
                let better = match best {
                    None => true,
                    Some((s, x, y)) => sum > s || (sum == s && pair < (x, y)),
                };
                if better {
                    best = Some((sum, pair.0, pair.1));
                }
            }
        }
        best.map(|(_, a, b)| (a, b))
    }

    /// Replaces solution vertex `v` by the best qualifying neighbour pair.
    pub fn weighted_one_two_swap(&mut self, v: Vertex) -> bool {
        if !self.in_solution[v] || self.locked[v] {
            return false;
        }
        let Some((a, b)) = self.best_one_two_pair(v) else { return false };
        self.remove(v);
        self.insert(a);
        self.insert(b);
        let freed = self.g.neighbors(v).to_vec();
        self.fill_free(freed);
        true
    }

    /// Applies improving moves until the queue is exhausted.
    pub fn local_search(&mut self) {
        while let Some(v) = self.queue.pop_front() {
            self.queued[v] = false;
            if self.in_solution[v] {
                self.weighted_one_two_swap(v);
            } else {
                self.omega_one_swap(v);
            }
        }
    }

    fn queue_everything(&mut self) {
        for i in 0..self.vertices.len() {
            let v = self.vertices[i];
            self.enqueue(v);
        }
    }

    /// Force-inserts up to `k` non-solution vertices and locks them for the
    /// following local search. The first is uniform; the others are drawn
    /// from its two-hop neighbourhood so the perturbation stays local.
    fn perturb(&mut self, k: usize) -> Vec<Vertex> {
        let mut forced = Vec::with_capacity(k);
        let n = self.vertices.len();
        let Some(first) = (0..8).map(|_| self.vertices[self.rng.gen_range(0..n)]).find(|&v| !self.in_solution[v])
        else {
            return forced;
        };
        let mut nearby = Vec::new();
        if k > 1 {
            let g = self.g;
            for &u in g.neighbors(first) {
                nearby.extend(g.neighbors(u).iter().copied().filter(|&x| x != first));
            }
            nearby.sort_unstable();
            nearby.dedup();
        }
        let mut candidates = vec![first];
        while forced.len() < k {
            let Some(v) = candidates.pop() else {
                if nearby.is_empty() {
                    break;
                }
                let i = self.rng.gen_range(0..nearby.len());
                candidates.push(nearby.swap_remove(i));
                continue;
            };
            if self.in_solution[v] {
                continue;
            }
            let evicted = self.solution_neighbors(v);
            if evicted.iter().any(|&u| self.locked[u]) {
                continue;
            }
            self.force_insert(v, &evicted);
            self.locked[v] = true;
            forced.push(v);
        }
        forced
    }

    fn revert(&mut self) {
        while let Some((v, inserted)) = self.undo.pop() {
            let wv = self.g.weight(v);
            if inserted {
                self.in_solution[v] = false;
                self.weight -= wv;
                for &u in self.g.neighbors(v) {
                    self.tightness[u] -= 1;
                    self.pressure[u] -= wv;
                }
            } else {
                self.in_solution[v] = true;
                self.weight += wv;
                for &u in self.g.neighbors(v) {
                    self.tightness[u] += 1;
                    self.pressure[u] += wv;
                }
            }
        }
        while let Some(v) = self.queue.pop_front() {
            self.queued[v] = false;
        }
    }
}

/// Runs the iterated local search on the alive vertices of `g`.
pub fn ils_run(g: &WeightedGraph, budget: IlsBudget, seed: u64) -> IlsOutcome {
    assert!(
        budget.max_iterations.is_some() || budget.time_limit.is_some(),
        "local search needs an iteration or time budget"
    );
    let start = Instant::now();
    let mut state = LsState::new(g, seed);
    state.queue_everything();
    state.local_search();
    state.undo.clear();

    let mut best = state.solution();
    let mut convergence = vec![ConvergencePoint { elapsed: start.elapsed().as_secs_f64(), weight: best.weight }];
    let mut k = 1;
    let mut stall = 0u64;
    let mut iterations = 0u64;
    // without edges the greedy start is the whole vertex set
    let nothing_to_improve = g.edge_count() == 0;

    loop {
        if nothing_to_improve
            || budget.max_iterations.is_some_and(|m| iterations >= m)
            || budget.time_limit.is_some_and(|t| start.elapsed() >= t)
        {
            break;
        }
        iterations += 1;
        let before = state.weight;
        state.undo.clear();
        let forced = state.perturb(k);
        state.local_search();
        for &v in &forced {
            state.locked[v] = false;
            if state.in_solution[v] {
                state.enqueue(v);
                for i in 0..g.neighbors(v).len() {
                    state.enqueue(g.neighbors(v)[i]);
                }
            }
        }
        // a second pass now that the perturbed vertices may move again
        state.local_search();

        if state.weight > best.weight {
            best = state.solution();
            convergence.push(ConvergencePoint { elapsed: start.elapsed().as_secs_f64(), weight: best.weight });
            k = 1;
            stall = 0;
            continue;
        }
        if state.weight < before {
            state.revert();
        }
        stall += 1;
        if stall.is_multiple_of(STALL_STEP) {
            k *= 2;
            if k > MAX_PERTURBATION.min(state.vertices.len()) {
                k = 1;
            }
        }
    }
    IlsOutcome { solution: best, convergence, iterations }
}
