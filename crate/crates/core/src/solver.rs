//! Branch-and-reduce driver.
//!
//! Every search node is reduced to a fixpoint, bounded with the clique cover,
//! split into connected components when it falls apart, and otherwise
//! branched on a maximum-degree vertex. Branching is iterative over an
//! explicit frame stack; each frame owns the graph checkpoint, lifting stack
//! length, offset, and reduction queues of its node so both children start
//! from the same state. Components are solved by nested searches on induced
//! subgraphs with a fresh incumbent.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::clique_cover_bound;
use crate::graph::{Checkpoint, Vertex, Weight, WeightedGraph};
use crate::local_search::{ils_run, ConvergencePoint, IlsBudget};
use crate::reduce::{lift_solution, LiftError, QueueSnapshot, Reducer, RuleCounts, RuleSet};
use crate::solution::{greedy_complete, CertificateError, Solution};

/// Nodes between two deadline checks.
pub const DEADLINE_CHECK_INTERVAL: u64 = 256;
/// Hard cap on one local search lower-bound run.
pub const MAX_LS_TIME: Duration = Duration::from_secs(10);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Every reduction at every node.
    #[default]
    Full,
    /// No critical sets; no clique rules in the first call; clique rules on
    /// triangles only and no meta reductions inside the search.
    Dense,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::Dense => "dense",
        }
    }

    pub fn initial_rules(self, max_meta_size: usize) -> RuleSet {
        match self {
            Variant::Full => RuleSet::full(),
            Variant::Dense => RuleSet::dense_initial(),
        }
        .with_max_meta_size(max_meta_size)
    }

    pub fn recursive_rules(self, max_meta_size: usize) -> RuleSet {
        match self {
            Variant::Full => RuleSet::full(),
            Variant::Dense => RuleSet::dense_recursive(),
        }
        .with_max_meta_size(max_meta_size)
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(Variant::Full),
            "dense" => Ok(Variant::Dense),
            other => Err(format!("unknown variant `{other}` (expected full or dense)")),
        }
    }
}

/// Which child of a branching node is explored first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchOrder {
    #[default]
    IncludeFirst,
    ExcludeFirst,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub variant: Variant,
    pub time_limit: Option<Duration>,
    pub seed: u64,
    /// Share of the time limit given to each local search lower-bound run.
    pub ls_fraction: f64,
    pub max_meta_size: usize,
    pub pruning: bool,
    pub branch_order: BranchOrder,
    /// Iterations per local search run; `None` scales with the graph size.
    pub ls_iterations: Option<u64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            variant: Variant::Full,
            time_limit: None,
            seed: 0,
            ls_fraction: 0.05,
            max_meta_size: crate::reduce::DEFAULT_MAX_META_SIZE,
            pruning: true,
            branch_order: BranchOrder::IncludeFirst,
            ls_iterations: None,
        }
    }
}

impl SolverConfig {
    fn ls_budget(&self, n: usize, remaining: Option<Duration>) -> IlsBudget {
        let iterations = self.ls_iterations.unwrap_or_else(|| (10 * n as u64).clamp(100, 100_000));
        let mut cap = MAX_LS_TIME;
        if let Some(limit) = self.time_limit {
            cap = cap.min(limit.mul_f64(self.ls_fraction.max(0.0)));
        }
        if let Some(r) = remaining {
            cap = cap.min(r);
        }
        IlsBudget { max_iterations: Some(iterations), time_limit: Some(cap) }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub nodes: u64,
    pub prunes: u64,
    pub leaves: u64,
    pub component_splits: u64,
    pub ls_runs: u64,
    pub rule_counts: RuleCounts,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub solution: Solution,
    pub stats: SolverStats,
    /// New best weights of the top-level search, in order.
    pub convergence: Vec<ConvergencePoint>,
    pub kernel_vertices: usize,
    pub kernel_edges: usize,
    pub elapsed: Duration,
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("lifting failed: {0}")]
    Lift(#[from] LiftError),
    #[error("solution certificate failed: {0}")]
    Certificate(#[from] CertificateError),
}

/// Shared by all nested searches of one solve.
struct Context<'c> {
    config: &'c SolverConfig,
    start: Instant,
    deadline: Option<Instant>,
    timed_out: bool,
    stats: SolverStats,
    initial_rules: RuleSet,
    recursive_rules: RuleSet,
}

impl Context<'_> {
    fn remaining(&self) -> Option<Duration> {
        self.deadline.map(|d| d.saturating_duration_since(Instant::now()))
    }

    fn count_node(&mut self) {
        self.stats.nodes += 1;
        if self.stats.nodes.is_multiple_of(DEADLINE_CHECK_INTERVAL) {
            self.check_deadline();
        }
    }

    fn check_deadline(&mut self) -> bool {
        if !self.timed_out && self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.timed_out = true;
        }
        self.timed_out
    }
}

/// Best independent set of a search's input graph.
#[derive(Debug, Clone)]
struct Incumbent {
    weight: Weight,
    vertices: Vec<Vertex>,
}

/// Incumbent, convergence log and kernel size `(n, m)` of one search.
type SearchResult = (Incumbent, Vec<ConvergencePoint>, (usize, usize));

enum NodeOutcome {
    Done,
    Branch(Vertex),
}

struct Frame {
    vertex: Vertex,
    second: bool,
    mark: Checkpoint,
    stack_len: usize,
    offset: Weight,
    queues: QueueSnapshot,
}

struct Search<'s, 'c> {
    ctx: &'s mut Context<'c>,
    g: WeightedGraph,
    reducer: Reducer,
    best: Option<Incumbent>,
    top_level: bool,
    convergence: Vec<ConvergencePoint>,
}

impl<'s, 'c> Search<'s, 'c> {
    fn new(ctx: &'s mut Context<'c>, g: WeightedGraph, top_level: bool) -> Self {
        let reducer = Reducer::new(&g);
        Self { ctx, g, reducer, best: None, top_level, convergence: Vec::new() }
    }

    fn best_weight(&self) -> Weight {
        self.best.as_ref().map_or(0, |b| b.weight)
    }

    /// Keeps `kernel_set` (alive vertices of the current graph, total weight
    /// `weight` with the offset) if it beats the incumbent.
    fn offer(&mut self, weight: Weight, kernel_set: &[Vertex]) -> Result<(), LiftError> {
        if self.best.is_some() && weight <= self.best_weight() {
            return Ok(());
        }
        let vertices = lift_solution(kernel_set, self.reducer.stack())?;
        self.best = Some(Incumbent { weight, vertices });
        if self.top_level {
            self.convergence.push(ConvergencePoint { elapsed: self.ctx.start.elapsed().as_secs_f64(), weight });
        }
        Ok(())
    }

    /// Seeds the incumbent with local search on the current graph.
    fn local_search_bound(&mut self) -> Result<(), LiftError> {
        if self.g.is_empty() || self.ctx.check_deadline() {
            return Ok(());
        }
        let budget = self.ctx.config.ls_budget(self.g.vertex_count(), self.ctx.remaining());
        self.ctx.stats.ls_runs += 1;
        let out = ils_run(&self.g, budget, self.ctx.config.seed);
        let weight = out.solution.weight + self.reducer.offset();
        self.offer(weight, &out.solution.vertices)
    }

    /// Greedy completion of the current graph when the budget is gone.
    fn greedy_fallback(&mut self) -> Result<(), LiftError> {
        let greedy = greedy_complete(&self.g, &Solution::default());
        let weight = greedy.weight + self.reducer.offset();
        self.offer(weight, &greedy.vertices)
    }

    fn run(mut self, first_rules: &RuleSet) -> Result<SearchResult, SolveError> {
        self.reducer.reduce(&mut self.g, first_rules);
        let kernel_size = (self.g.vertex_count(), self.g.edge_count());
        if self.ctx.check_deadline() {
            self.greedy_fallback()?;
        } else {
            self.local_search_bound()?;
            self.branch_and_reduce()?;
            if self.best.is_none() {
                self.greedy_fallback()?;
            }
        }
        let stats = &mut self.ctx.stats.rule_counts;
        *stats = stats.merged(self.reducer.counts());
        let best = self.best.expect("an incumbent is always recorded");
        Ok((best, self.convergence, kernel_size))
    }

    fn branch_and_reduce(&mut self) -> Result<(), SolveError> {
        let recursive = self.ctx.recursive_rules.clone();
        let mut frames: Vec<Frame> = Vec::new();
        loop {
            self.ctx.count_node();
            if self.ctx.timed_out {
                return Ok(());
            }
            self.reducer.reduce(&mut self.g, &recursive);
            if let NodeOutcome::Branch(v) = self.evaluate()? {
                let frame = Frame {
                    vertex: v,
                    second: false,
                    mark: self.g.checkpoint(),
                    stack_len: self.reducer.stack().len(),
                    offset: self.reducer.offset(),
                    queues: self.reducer.snapshot_queues(),
                };
                frames.push(frame);
                self.apply_branch(v, self.ctx.config.branch_order == BranchOrder::IncludeFirst);
                continue;
            }
            // backtrack to the next unexplored child
            loop {
                let Some(frame) = frames.last_mut() else { return Ok(()) };
                self.g.rollback(frame.mark).expect("frames unwind in LIFO order");
                self.reducer.truncate(frame.stack_len, frame.offset);
                self.reducer.restore_queues(&frame.queues);
                if frame.second {
                    frames.pop();
                    continue;
                }
                frame.second = true;
                frame.mark = self.g.checkpoint();
                let v = frame.vertex;
                self.apply_branch(v, self.ctx.config.branch_order == BranchOrder::ExcludeFirst);
                break;
            }
        }
    }

    fn apply_branch(&mut self, v: Vertex, include: bool) {
        if include {
            self.reducer.branch_include(&mut self.g, v);
        } else {
            self.reducer.branch_exclude(&mut self.g, v);
        }
    }

    /// Handles a reduced node: leaf, prune, component split, or branch.
    fn evaluate(&mut self) -> Result<NodeOutcome, SolveError> {
        let c = self.reducer.offset();
        if self.g.is_empty() {
            self.ctx.stats.leaves += 1;
            self.offer(c, &[])?;
            return Ok(NodeOutcome::Done);
        }
        if self.ctx.config.pruning && c + clique_cover_bound(&self.g) <= self.best_weight() {
            self.ctx.stats.prunes += 1;
            return Ok(NodeOutcome::Done);
        }
        let components = self.g.connected_components();
        if components.len() > 1 {
            self.ctx.stats.component_splits += 1;
            self.solve_components(c, &components)?;
            return Ok(NodeOutcome::Done);
        }
        Ok(NodeOutcome::Branch(branching_vertex(&self.g)))
    }

    fn solve_components(&mut self, c: Weight, components: &[Vec<Vertex>]) -> Result<(), SolveError> {
        let recursive = self.ctx.recursive_rules.clone();
        let mut total = c;
        let mut kernel_set = Vec::new();
        for component in components {
            let (sub, map) = self.g.induced_subgraph(component);
            let search = Search::new(self.ctx, sub, false);
            let (best, _, _) = search.run(&recursive)?;
            total += best.weight;
            kernel_set.extend(best.vertices.iter().map(|&v| map[v]));
        }
        self.offer(total, &kernel_set)?;
        Ok(())
    }
}

/// Maximum degree; ties to the larger weight, then the lower id.
pub fn branching_vertex(g: &WeightedGraph) -> Vertex {
    g.vertices()
        .max_by(|&a, &b| g.degree(a).cmp(&g.degree(b)).then(g.weight(a).cmp(&g.weight(b))).then(b.cmp(&a)))
        .expect("branching on an empty graph")
}

/// Exact when no deadline is hit; otherwise the best verified independent
/// set found, completed greedily and flagged non-optimal.
pub fn solve(g: &WeightedGraph, config: &SolverConfig) -> Result<SolveOutcome, SolveError> {
    let start = Instant::now();
    let mut ctx = Context {
        config,
        start,
        deadline: config.time_limit.map(|t| start + t),
        timed_out: false,
        stats: SolverStats::default(),
        initial_rules: config.variant.initial_rules(config.max_meta_size),
        recursive_rules: config.variant.recursive_rules(config.max_meta_size),
    };
    let mut input = g.clone();
    input.clear_log();
    let first = ctx.initial_rules.clone();
    let (best, mut convergence, (kernel_vertices, kernel_edges)) = Search::new(&mut ctx, input, true).run(&first)?;

    let mut solution = Solution::from_vertices(g, best.vertices);
    if ctx.timed_out {
        solution = greedy_complete(g, &solution);
        solution.optimal = false;
        if convergence.last().is_none_or(|p| p.weight < solution.weight) {
            convergence.push(ConvergencePoint { elapsed: start.elapsed().as_secs_f64(), weight: solution.weight });
        }
    } else {
        solution.optimal = true;
    }
    if !ctx.timed_out && solution.weight != best.weight {
        return Err(CertificateError::WeightMismatch { claimed: best.weight, actual: solution.weight }.into());
    }
    solution.verify(g)?;
    if convergence.is_empty() {
        convergence.push(ConvergencePoint { elapsed: start.elapsed().as_secs_f64(), weight: solution.weight });
    }
    Ok(SolveOutcome {
        solution,
        stats: ctx.stats,
        convergence,
        kernel_vertices,
        kernel_edges,
        elapsed: start.elapsed(),
    })
}

/// Result of [`hybrid`].
#[derive(Debug, Clone)]
pub struct HybridOutcome {
    pub solution: Solution,
    /// Weights in terms of the input graph (kernel weight plus offset).
    pub convergence: Vec<ConvergencePoint>,
    pub kernel_vertices: usize,
    pub kernel_edges: usize,
    pub iterations: u64,
    pub elapsed: Duration,
}

/// Reduces `g` with `rules`, runs local search on the kernel for whatever is
/// left of `budget`, and lifts the result. The reduction time counts
/// against a time budget.
pub fn hybrid(g: &WeightedGraph, rules: &RuleSet, budget: IlsBudget, seed: u64) -> Result<HybridOutcome, SolveError> {
    let start = Instant::now();
    let kernel = crate::reduce::reduce_to_kernel(g, rules);
    let reduce_time = start.elapsed();
    let remaining = IlsBudget {
        max_iterations: budget.max_iterations,
        time_limit: budget.time_limit.map(|t| t.saturating_sub(reduce_time)),
    };
    let (kernel_solution, mut convergence, iterations) = if kernel.kernel.is_empty() {
        (Vec::new(), Vec::new(), 0)
    } else {
        let out = ils_run(&kernel.kernel, remaining, seed);
        (out.solution.vertices, out.convergence, out.iterations)
    };
    for p in &mut convergence {
        p.elapsed += reduce_time.as_secs_f64();
        p.weight += kernel.offset;
    }
    let lifted = kernel.lift(&kernel_solution)?;
    let mut solution = Solution::from_vertices(g, lifted.vertices);
    if solution.weight != lifted.weight {
        return Err(CertificateError::WeightMismatch { claimed: lifted.weight, actual: solution.weight }.into());
    }
    solution.verify(g)?;
    if convergence.is_empty() {
        convergence.push(ConvergencePoint { elapsed: start.elapsed().as_secs_f64(), weight: solution.weight });
    }
    // a kernel the local search cannot improve on is exact
    solution.optimal = kernel.kernel.is_empty();
    Ok(HybridOutcome {
        solution,
        convergence,
        kernel_vertices: kernel.kernel.vertex_count(),
        kernel_edges: kernel.kernel.edge_count(),
        iterations,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_force_mwis;

    fn graph(weights: &[Weight], edges: &[(Vertex, Vertex)]) -> WeightedGraph {
        WeightedGraph::from_edges(weights.to_vec(), edges).unwrap()
    }

    fn both_variants() -> [SolverConfig; 2] {
        [SolverConfig::default(), SolverConfig { variant: Variant::Dense, ..SolverConfig::default() }]
    }

    #[test]
    fn empty_graph() {
        let g = graph(&[], &[]);
        let out = solve(&g, &SolverConfig::default()).unwrap();
        assert_eq!((out.solution.weight, out.solution.optimal), (0, true));
        assert!(out.solution.vertices.is_empty());
    }

    #[test]
    fn single_edge() {
        for config in both_variants() {
            let out = solve(&graph(&[5, 1], &[(0, 1)]), &config).unwrap();
            assert_eq!(out.solution.vertices, vec![0]);
            assert_eq!(out.solution.weight, 5);
            assert!(out.solution.optimal);
        }
    }

    #[test]
    fn two_disjoint_edges() {
        for config in both_variants() {
            let out = solve(&graph(&[5, 1, 2, 7], &[(0, 1), (2, 3)]), &config).unwrap();
            assert_eq!(out.solution.weight, 12);
        }
    }

    #[test]
    fn branches_on_star_center() {
        let g = graph(&[1, 1, 1, 1, 1], &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        assert_eq!(branching_vertex(&g), 0);
    }

    #[test]
    fn degree_tie_prefers_heavier() {
        let g = graph(&[1, 4, 2, 1], &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(branching_vertex(&g), 1);
        let g = graph(&[1, 3, 3, 1], &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(branching_vertex(&g), 1);
    }

    #[test]
    fn petersen_without_reductions_matches_oracle() {
        let outer = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)];
        let spokes = [(0, 5), (1, 6), (2, 7), (3, 8), (4, 9)];
        let inner = [(5, 7), (7, 9), (9, 6), (6, 8), (8, 5)];
        let edges: Vec<_> = outer.iter().chain(&spokes).chain(&inner).copied().collect();
        let g = graph(&[3, 1, 4, 1, 5, 9, 2, 6, 5, 3], &edges);
        let oracle = brute_force_mwis(&g).unwrap().weight;
        for config in both_variants() {
            for order in [BranchOrder::IncludeFirst, BranchOrder::ExcludeFirst] {
                for pruning in [true, false] {
                    let config = SolverConfig { branch_order: order, pruning, ..config.clone() };
                    assert_eq!(solve(&g, &config).unwrap().solution.weight, oracle);
                }
            }
        }
    }

    #[test]
    fn hybrid_on_tree_is_exact() {
        let g = graph(&[3, 9, 2, 4, 8], &[(0, 1), (1, 2), (1, 3), (3, 4)]);
        let out = hybrid(&g, &RuleSet::full(), IlsBudget::iterations(10), 0).unwrap();
        assert_eq!(out.solution.weight, brute_force_mwis(&g).unwrap().weight);
        assert!(out.solution.optimal);
        assert_eq!(out.kernel_vertices, 0);
    }

    #[test]
    fn zero_time_limit_is_anytime() {
        let g = graph(&[5, 1, 2, 7], &[(0, 1), (1, 2), (2, 3)]);
        let config = SolverConfig { time_limit: Some(Duration::ZERO), ..SolverConfig::default() };
        let out = solve(&g, &config).unwrap();
        assert!(!out.solution.optimal);
        out.solution.verify(&g).unwrap();
    }
}
