//! Weighted data reductions, their incremental scheduler and the lifting
//! stack that maps kernel solutions back to the input graph.

mod critical;
mod lift;
mod rules;

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;

pub use critical::{critical_set, CriticalSet, CutCertificateError};
pub use lift::{lift_solution, FoldRecord, Lift, LiftError, RecordKind};

use crate::graph::{Vertex, Weight, WeightedGraph};
use crate::solution::Solution;

/// Cap on the local subproblem size of the meta reductions.
pub const DEFAULT_MAX_META_SIZE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    NeighborhoodRemoval,
    Domination,
    VertexFolding,
    IsolatedVertex,
    WeightTransfer,
    Twin,
    NeighborRemoval,
    NeighborhoodFolding,
    CriticalSet,
}

impl Rule {
    /// Default application order.
    pub const ALL: [Rule; 9] = [
        Rule::NeighborhoodRemoval,
        Rule::Domination,
        Rule::VertexFolding,
        Rule::IsolatedVertex,
        Rule::WeightTransfer,
        Rule::Twin,
        Rule::NeighborRemoval,
        Rule::NeighborhoodFolding,
        Rule::CriticalSet,
    ];

    const LOCAL_COUNT: usize = 8;

    fn index(self) -> usize {
        self as usize
    }

    pub fn is_global(self) -> bool {
        self == Rule::CriticalSet
    }

    pub fn name(self) -> &'static str {
        match self {
            Rule::NeighborhoodRemoval => "neighborhood_removal",
            Rule::Domination => "domination",
            Rule::VertexFolding => "vertex_folding",
            Rule::IsolatedVertex => "isolated_vertex",
            Rule::WeightTransfer => "weight_transfer",
            Rule::Twin => "twin",
            Rule::NeighborRemoval => "neighbor_removal",
            Rule::NeighborhoodFolding => "neighborhood_folding",
            Rule::CriticalSet => "critical_set",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The enabled rules, in order, plus their tuning knobs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
    /// Isolated-vertex rules only consider vertices up to this degree.
    pub clique_degree_limit: Option<usize>,
    pub max_meta_size: usize,
}

impl RuleSet {
    pub fn full() -> Self {
        Self { rules: Rule::ALL.to_vec(), clique_degree_limit: None, max_meta_size: DEFAULT_MAX_META_SIZE }
    }

    /// Dense configuration, first reduction call: no critical set and no
    /// clique rules.
    pub fn dense_initial() -> Self {
        Self {
            rules: vec![
                Rule::NeighborhoodRemoval,
                Rule::Domination,
                Rule::VertexFolding,
                Rule::Twin,
                Rule::NeighborRemoval,
                Rule::NeighborhoodFolding,
            ],
            clique_degree_limit: None,
            max_meta_size: DEFAULT_MAX_META_SIZE,
        }
    }

    /// Dense configuration inside the search: clique rules on triangles only,
    /// no meta reductions, no critical set.
    pub fn dense_recursive() -> Self {
        Self {
            rules: vec![
                Rule::NeighborhoodRemoval,
                Rule::Domination,
                Rule::VertexFolding,
                Rule::IsolatedVertex,
                Rule::WeightTransfer,
                Rule::Twin,
            ],
            clique_degree_limit: Some(2),
            max_meta_size: DEFAULT_MAX_META_SIZE,
        }
    }

    pub fn only(rule: Rule) -> Self {
        Self { rules: vec![rule], clique_degree_limit: None, max_meta_size: DEFAULT_MAX_META_SIZE }
    }

    pub fn with_max_meta_size(mut self, size: usize) -> Self {
        self.max_meta_size = size;
        self
    }
}

/// How a pass picks the vertices it examines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheduling {
    /// Only vertices whose neighbourhood changed since the rule last ran.
    #[default]
    Incremental,
    /// Every alive vertex on every pass. Reference behaviour for testing.
    FullScan,
}

/// Successful applications per rule.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RuleCounts([u64; 9]);

impl RuleCounts {
    pub fn get(&self, rule: Rule) -> u64 {
        self.0[rule.index()]
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Rule, u64)> + '_ {
        Rule::ALL.iter().map(|&r| (r, self.0[r.index()]))
    }

    pub fn merged(mut self, other: RuleCounts) -> RuleCounts {
        for (a, b) in self.0.iter_mut().zip(other.0) {
            *a += b;
        }
        self
    }
}

#[derive(Debug, Clone, Default)]
struct DirtyQueue {
    queued: Vec<bool>,
    pending: Vec<Vertex>,
    /// Vertices still to be examined by the pass currently running.
    current: BinaryHeap<Reverse<Vertex>>,
}

impl DirtyQueue {
    fn ensure(&mut self, v: Vertex) {
        if v >= self.queued.len() {
            self.queued.resize(v + 1, false);
        }
    }

    fn clear(&mut self) {
        for &v in &self.pending {
            self.queued[v] = false;
        }
        for &Reverse(v) in &self.current {
            self.queued[v] = false;
        }
        self.pending.clear();
        self.current.clear();
    }
}

/// Snapshot of the dirty queues, restored on backtracking.
#[derive(Debug, Clone, Default)]
pub struct QueueSnapshot(Vec<Vec<Vertex>>);

/// Applies reductions to a graph it does not own, accumulating the offset and
/// the lifting stack.
#[derive(Debug, Clone)]
pub struct Reducer {
    stack: Vec<FoldRecord>,
    offset: Weight,
    queues: Vec<DirtyQueue>,
    /// Rule whose pass is running and the vertex it is examining.
    active: Option<(usize, Vertex)>,
    scheduling: Scheduling,
    counts: RuleCounts,
    clique_degree_limit: Option<usize>,
    max_meta_size: usize,
}

impl Reducer {
    /// Starts with every alive vertex of `g` queued for every rule.
    pub fn new(g: &WeightedGraph) -> Self {
        let mut reducer = Self {
            stack: Vec::new(),
            offset: 0,
            queues: vec![DirtyQueue::default(); Rule::LOCAL_COUNT],
            active: None,
            scheduling: Scheduling::Incremental,
            counts: RuleCounts::default(),
            clique_degree_limit: None,
            max_meta_size: DEFAULT_MAX_META_SIZE,
        };
        reducer.mark_all(g);
        reducer
    }

    pub fn with_scheduling(mut self, scheduling: Scheduling) -> Self {
        self.scheduling = scheduling;
        self
    }

    pub fn offset(&self) -> Weight {
        self.offset
    }

    pub fn stack(&self) -> &[FoldRecord] {
        &self.stack
    }

    pub fn counts(&self) -> RuleCounts {
        self.counts
    }

    pub fn into_parts(self) -> (Vec<FoldRecord>, Weight, RuleCounts) {
        (self.stack, self.offset, self.counts)
    }

    /// Forgets records past `stack_len` and restores the offset; used when
    /// the graph is rolled back.
    pub fn truncate(&mut self, stack_len: usize, offset: Weight) {
        self.stack.truncate(stack_len);
        self.offset = offset;
    }

    pub fn mark_all(&mut self, g: &WeightedGraph) {
        for v in g.vertices() {
            self.mark(v);
        }
    }

    fn mark(&mut self, v: Vertex) {
        for (i, q) in self.queues.iter_mut().enumerate() {
            q.ensure(v);
            if q.queued[v] {
                continue;
            }
            q.queued[v] = true;
            match self.active {
                Some((rule, cursor)) if rule == i && v > cursor => q.current.push(Reverse(v)),
                _ => q.pending.push(v),
            }
        }
    }

    pub fn snapshot_queues(&self) -> QueueSnapshot {
        debug_assert!(self.active.is_none());
        QueueSnapshot(self.queues.iter().map(|q| q.pending.clone()).collect())
    }

    pub fn restore_queues(&mut self, snapshot: &QueueSnapshot) {
        for (q, items) in self.queues.iter_mut().zip(&snapshot.0) {
            q.clear();
            for &v in items {
                q.ensure(v);
                q.queued[v] = true;
            }
            q.pending.extend_from_slice(items);
        }
    }

    pub fn clear_queues(&mut self) {
        for q in &mut self.queues {
            q.clear();
        }
    }

    /// True when no vertex is waiting for any local rule.
    pub fn queues_empty(&self) -> bool {
        self.queues.iter().all(|q| q.pending.is_empty() && q.current.is_empty())
    }

    // ---- edits that keep the queues in sync ----

    fn remove(&mut self, g: &mut WeightedGraph, v: Vertex) {
        for i in 0..g.degree(v) {
            let u = g.neighbors(v)[i];
            self.mark(u);
        }
        g.remove_vertex(v).expect("reductions only remove alive vertices");
    }

    fn reweight(&mut self, g: &mut WeightedGraph, v: Vertex, weight: Weight) {
        g.set_weight(v, weight).expect("reweighted vertex alive with positive weight");
        self.mark(v);
        for i in 0..g.degree(v) {
            let u = g.neighbors(v)[i];
            self.mark(u);
        }
    }

    fn push(&mut self, kind: RecordKind, offset: Weight, consumed: Vec<Vertex>, introduced: Option<Vertex>, lift: Lift) {
        self.offset += offset;
        self.stack.push(FoldRecord { kind, offset, consumed, introduced, lift });
    }

    /// Puts `set` (independent) into the solution and deletes `N[set]`.
    fn take(&mut self, g: &mut WeightedGraph, kind: RecordKind, set: Vec<Vertex>) {
        let offset = g.set_weight_of(&set);
        let mut consumed = set.clone();
        for &v in &set {
            consumed.extend_from_slice(g.neighbors(v));
        }
        consumed.sort_unstable();
        consumed.dedup();
        for &v in &consumed {
            self.remove(g, v);
        }
        self.push(kind, offset, consumed, None, Lift::Take(set));
    }

    fn discard(&mut self, g: &mut WeightedGraph, kind: RecordKind, v: Vertex) {
        self.remove(g, v);
        self.push(kind, 0, vec![v], None, Lift::Nothing);
    }

    /// Replaces `consumed` by a new vertex adjacent to the outside neighbours
    /// of `if_folded`.
    fn fold(
        &mut self,
        g: &mut WeightedGraph,
        rule: Rule,
        otherwise: Vec<Vertex>,
        if_folded: Vec<Vertex>,
    ) -> Vertex {
        let base_weight = g.set_weight_of(&otherwise);
        let folded_weight = g.set_weight_of(&if_folded) - base_weight;
        let mut consumed: Vec<Vertex> = otherwise.iter().chain(&if_folded).copied().collect();
        consumed.sort_unstable();
        let mut outside: Vec<Vertex> = if_folded
            .iter()
            .flat_map(|&x| g.neighbors(x).iter().copied())
            .filter(|u| consumed.binary_search(u).is_err())
            .collect();
        outside.sort_unstable();
        outside.dedup();
        for &v in &consumed {
            self.remove(g, v);
        }
        let folded = g.insert_vertex(folded_weight, &outside).expect("fold weight positive");
        // the new vertex changes the neighbourhoods of everything within two hops
        self.mark(folded);
        for &u in &outside {
            self.mark(u);
            for i in 0..g.degree(u) {
                let x = g.neighbors(u)[i];
                self.mark(x);
            }
        }
        self.push(
            RecordKind::Reduction(rule),
            base_weight,
            consumed,
            Some(folded),
            Lift::Fold { folded, if_folded, otherwise },
        );
        folded
    }

    /// Branching: `v` into the solution, `N[v]` deleted.
    pub fn branch_include(&mut self, g: &mut WeightedGraph, v: Vertex) {
        self.take(g, RecordKind::Branch, vec![v]);
    }

    /// Branching: `v` deleted.
    pub fn branch_exclude(&mut self, g: &mut WeightedGraph, v: Vertex) {
        self.discard(g, RecordKind::Branch, v);
    }

    // ---- scheduler ----

    /// Applies `rules` until none fires. After any change the scan restarts
    /// at the first rule. Returns whether the graph changed.
    pub fn reduce(&mut self, g: &mut WeightedGraph, rules: &RuleSet) -> bool {
        self.clique_degree_limit = rules.clique_degree_limit;
        self.max_meta_size = rules.max_meta_size;
        let mut changed_any = false;
        let mut i = 0;
        while i < rules.rules.len() {
            let changed = self.run_pass(g, rules.rules[i]);
            changed_any |= changed;
            i = if changed { 0 } else { i + 1 };
        }
        changed_any
    }

    fn run_pass(&mut self, g: &mut WeightedGraph, rule: Rule) -> bool {
        if rule.is_global() {
            return self.critical_set_reduction(g);
        }
        let mut changed = false;
        match self.scheduling {
            Scheduling::FullScan => {
                let mut v = 0;
                while v < g.capacity() {
                    if g.is_alive(v) && self.apply_local(g, rule, v) {
                        changed = true;
                    }
                    v += 1;
                }
            }
            Scheduling::Incremental => {
                let idx = rule.index();
                let q = &mut self.queues[idx];
                let pending = std::mem::take(&mut q.pending);
                q.current.extend(pending.into_iter().map(Reverse));
                while let Some(Reverse(v)) = self.queues[idx].current.pop() {
                    self.queues[idx].queued[v] = false;
                    self.active = Some((idx, v));
                    if g.is_alive(v) && self.apply_local(g, rule, v) {
                        changed = true;
                    }
                }
                self.active = None;
            }
        }
        changed
    }

    fn apply_local(&mut self, g: &mut WeightedGraph, rule: Rule, v: Vertex) -> bool {
        let applied = match rule {
            Rule::NeighborhoodRemoval => self.neighborhood_removal(g, v),
            Rule::Domination => self.domination_at(g, v),
            Rule::VertexFolding => self.weighted_vertex_folding(g, v),
            Rule::IsolatedVertex => self.isolated_vertex_removal(g, v),
            Rule::WeightTransfer => self.isolated_weight_transfer(g, v),
            Rule::Twin => self.twin_at(g, v),
            Rule::NeighborRemoval => self.neighbor_removal_at(g, v),
            Rule::NeighborhoodFolding => self.neighborhood_folding(g, v),
            Rule::CriticalSet => unreachable!("global rule"),
        };
        if applied {
            self.counts.0[rule.index()] += 1;
        }
        applied
    }

    /// Runs every rule of `rules` once over all alive vertices of a copy of
    /// `g` and reports how many applications fired.
    pub fn count_applicable(g: &WeightedGraph, rules: &RuleSet) -> u64 {
        let mut total = 0;
        for &rule in &rules.rules {
            let mut reducer = Reducer::new(g).with_scheduling(Scheduling::FullScan);
            reducer.clique_degree_limit = rules.clique_degree_limit;
            reducer.max_meta_size = rules.max_meta_size;
            let mut probe = g.clone();
            reducer.run_pass(&mut probe, rule);
            total += reducer.counts.total();
        }
        total
    }
}

/// A reduced graph together with what is needed to lift its solutions.
#[derive(Debug, Clone)]
pub struct KernelResult {
    pub kernel: WeightedGraph,
    pub offset: Weight,
    pub stack: Vec<FoldRecord>,
    pub counts: RuleCounts,
    pub original_vertex_count: usize,
}

impl KernelResult {
    /// Vertices already decided into the solution.
    pub fn forced_in(&self) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = self
            .stack
            .iter()
            .filter_map(|r| match &r.lift {
                Lift::Take(vs) => Some(vs.iter().copied()),
                _ => None,
            })
            .flatten()
            .collect();
        out.sort_unstable();
        out
    }

    /// Maps an independent set of the kernel to one of the input graph whose
    /// weight is the kernel weight plus the offset.
    pub fn lift(&self, kernel_solution: &[Vertex]) -> Result<Solution, LiftError> {
        if let Some(&v) = kernel_solution.iter().find(|&&v| !self.kernel.is_alive(v)) {
            return Err(LiftError::NotInKernel(v));
        }
        if let Some((u, v)) = self.kernel.find_conflict(kernel_solution) {
            return Err(LiftError::NotIndependent(u, v));
        }
        let weight = self.kernel.set_weight_of(kernel_solution) + self.offset;
        let vertices = lift_solution(kernel_solution, &self.stack)?;
        Ok(Solution { vertices, weight, optimal: false })
    }
}

/// Reduces a copy of `g` to a fixpoint of `rules`.
pub fn reduce_to_kernel(g: &WeightedGraph, rules: &RuleSet) -> KernelResult {
    reduce_to_kernel_with(g, rules, Scheduling::Incremental)
}

pub fn reduce_to_kernel_with(g: &WeightedGraph, rules: &RuleSet, scheduling: Scheduling) -> KernelResult {
    let mut kernel = g.clone();
    let mut reducer = Reducer::new(&kernel).with_scheduling(scheduling);
    reducer.reduce(&mut kernel, rules);
    kernel.clear_log();
    let (stack, offset, counts) = reducer.into_parts();
    KernelResult { kernel, offset, stack, counts, original_vertex_count: g.capacity() }
}
