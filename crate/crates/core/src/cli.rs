//! Command-line front end.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{bail, Context as _, Result};
use clap::{Args, Parser, Subcommand};

use crate::graph::{Weight, WeightedGraph};
use crate::io::{
    convergence_csv, generate_weights, parse_graph_with_format, read_solution, to_external, write_graph, LiftFile,
    ResultRecord,
};
use crate::local_search::{ils_run, ConvergencePoint, IlsBudget};
use crate::oracle::brute_force_mwis;
use crate::reduce::{reduce_to_kernel, Rule};
use crate::solution::Solution;
use crate::solver::{hybrid, solve, SolverConfig, Variant};

#[derive(Debug, Parser)]
#[command(name = "mwis", version, about = "Maximum weight independent set solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact branch-and-reduce; anytime under --time-limit.
    Solve(SolveArgs),
    /// Reduce to a kernel and write it with its lifting sidecar.
    Reduce(ReduceArgs),
    /// Iterated local search on the whole graph.
    Ls(HeuristicArgs),
    /// Reduce, run local search on the kernel, lift.
    Hybrid(HeuristicArgs),
    /// Exhaustive search (at most 24 vertices).
    Oracle(CommonArgs),
    /// Check a solution file against a graph.
    Verify(VerifyArgs),
    /// Write the graph with generated weights.
    GenWeights(GenWeightsArgs),
    /// Lift a kernel solution back to the original graph.
    Lift(LiftArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Graph file.
    pub graph: PathBuf,
    /// Seed for generated weights and randomized components.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `file` keeps the weights of the graph file; `generate:LO:HI` draws
    /// them uniformly. Default: file weights, or generate:1:200 for
    /// unweighted files.
    #[arg(long)]
    pub weights: Option<String>,
    /// Result record destination (default: stdout).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Instance name in the result record (default: graph file name).
    #[arg(long)]
    pub instance: Option<String>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value = "full")]
    pub variant: Variant,
    /// Seconds; unlimited when absent.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Convergence CSV destination.
    #[arg(long)]
    pub convergence: Option<PathBuf>,
    /// Disable clique cover pruning.
    #[arg(long)]
    pub no_prune: bool,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value = "full")]
    pub variant: Variant,
    #[arg(long)]
    pub kernel_out: PathBuf,
    #[arg(long)]
    pub lift: PathBuf,
}

#[derive(Debug, Args)]
pub struct HeuristicArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Seconds.
    #[arg(long, default_value_t = 10.0)]
    pub time_limit: f64,
    /// Stop after this many local search iterations.
    #[arg(long)]
    pub iterations: Option<u64>,
    /// Reduction rules used by `hybrid`.
    #[arg(long, default_value = "full")]
    pub variant: Variant,
    #[arg(long)]
    pub convergence: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub graph: PathBuf,
    /// Result record line or whitespace-separated 1-based ids.
    pub solution: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub weights: Option<String>,
}

#[derive(Debug, Args)]
pub struct GenWeightsArgs {
    pub graph: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `LO:HI`
    #[arg(long, default_value = "1:200")]
    pub range: String,
    /// Weighted graph destination (default: stdout).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LiftArgs {
    /// Original graph.
    pub graph: PathBuf,
    /// Kernel solution: result record or 1-based kernel ids.
    pub kernel_solution: PathBuf,
    #[arg(long)]
    pub lift: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub weights: Option<String>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Parses the arguments (program name first) and runs the command. Returns
/// the process exit code: 0 on success, 1 on failure, 2 on usage errors.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn parse_range(text: &str) -> Result<(Weight, Weight)> {
    let (lo, hi) = text.split_once(':').context("weight range must be LO:HI")?;
    let (lo, hi): (Weight, Weight) = (lo.parse()?, hi.parse()?);
    if lo < 1 || hi < lo {
        bail!("weight range needs 1 <= LO <= HI, got {lo}:{hi}");
    }
    Ok((lo, hi))
}

fn load(path: &Path, weights: Option<&str>, seed: u64) -> Result<WeightedGraph> {
    let (mut g, weighted) = parse_graph_with_format(path)?;
    match weights {
        Some("file") => {}
        Some(source) => {
            let range = source.strip_prefix("generate:").context("--weights must be `file` or `generate:LO:HI`")?;
            let (lo, hi) = parse_range(range)?;
            generate_weights(&mut g, seed, lo, hi);
        }
        None if !weighted => generate_weights(&mut g, seed, 1, 200),
        None => {}
    }
    Ok(g)
}

fn load_common(c: &CommonArgs) -> Result<WeightedGraph> {
    load(&c.graph, c.weights.as_deref(), c.seed)
}

fn instance_name(c: &CommonArgs) -> String {
    c.instance.clone().unwrap_or_else(|| {
        c.graph.file_name().map_or_else(|| c.graph.display().to_string(), |f| f.to_string_lossy().into_owned())
    })
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn record(
    c: &CommonArgs,
    variant: &str,
    solution: &Solution,
    elapsed: Duration,
    kernel: (usize, usize),
) -> ResultRecord {
    ResultRecord {
        instance: instance_name(c),
        weight: solution.weight,
        optimal: solution.optimal,
        elapsed_seconds: elapsed.as_secs_f64(),
        seed: c.seed,
        variant: variant.to_string(),
        kernel_n: kernel.0,
        kernel_m: kernel.1,
        solution: to_external(&solution.vertices),
    }
}

fn write_convergence(path: Option<&Path>, points: &[ConvergencePoint]) -> Result<()> {
    if let Some(path) = path {
        emit(Some(path), &convergence_csv(points))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve(a) => {
            let g = load_common(&a.common)?;
            let config = SolverConfig {
                variant: a.variant,
                time_limit: a.time_limit.map(Duration::from_secs_f64),
                seed: a.common.seed,
                pruning: !a.no_prune,
                ..SolverConfig::default()
            };
            let out = solve(&g, &config)?;
            write_convergence(a.convergence.as_deref(), &out.convergence)?;
            let r = record(&a.common, a.variant.name(), &out.solution, out.elapsed, (out.kernel_vertices, out.kernel_edges));
            emit(a.common.output.as_deref(), &(r.to_json_line() + "\n"))
        }
        Command::Reduce(a) => {
            let g = load_common(&a.common)?;
            let start = Instant::now();
            let kernel = reduce_to_kernel(&g, &a.variant.initial_rules(crate::reduce::DEFAULT_MAX_META_SIZE));
            let (text, map) = write_graph(&kernel.kernel);
            emit(Some(&a.kernel_out), &text)?;
            emit(Some(&a.lift), &LiftFile::from_kernel(&kernel, map).to_text())?;
            let counts: serde_json::Map<String, serde_json::Value> =
                Rule::ALL.iter().map(|&r| (r.name().to_string(), kernel.counts.get(r).into())).collect();
            let summary = serde_json::json!({
                "instance": instance_name(&a.common),
                "n": g.vertex_count(),
                "m": g.edge_count(),
                "kernel_n": kernel.kernel.vertex_count(),
                "kernel_m": kernel.kernel.edge_count(),
                "offset": kernel.offset,
                "elapsed_seconds": start.elapsed().as_secs_f64(),
                "rules": counts,
            });
            emit(a.common.output.as_deref(), &(summary.to_string() + "\n"))
        }
        Command::Ls(a) => {
            let g = load_common(&a.common)?;
            let budget = IlsBudget {
                max_iterations: a.iterations,
                time_limit: Some(Duration::from_secs_f64(a.time_limit)),
            };
            let start = Instant::now();
            let out = ils_run(&g, budget, a.common.seed);
            let elapsed = start.elapsed();
            out.solution.verify(&g)?;
            write_convergence(a.convergence.as_deref(), &out.convergence)?;
            let r = record(&a.common, "ls", &out.solution, elapsed, (g.vertex_count(), g.edge_count()));
            emit(a.common.output.as_deref(), &(r.to_json_line() + "\n"))
        }
        Command::Hybrid(a) => {
            let g = load_common(&a.common)?;
            let budget = IlsBudget {
                max_iterations: a.iterations,
                time_limit: Some(Duration::from_secs_f64(a.time_limit)),
            };
            let rules = a.variant.initial_rules(crate::reduce::DEFAULT_MAX_META_SIZE);
            let out = hybrid(&g, &rules, budget, a.common.seed)?;
            write_convergence(a.convergence.as_deref(), &out.convergence)?;
            let r = record(&a.common, "hybrid", &out.solution, out.elapsed, (out.kernel_vertices, out.kernel_edges));
            emit(a.common.output.as_deref(), &(r.to_json_line() + "\n"))
        }
        Command::Oracle(a) => {
            let g = load_common(&a)?;
            let start = Instant::now();
            let mut solution = brute_force_mwis(&g)?;
            solution.optimal = true;
            let r = record(&a, "oracle", &solution, start.elapsed(), (g.vertex_count(), g.edge_count()));
            emit(a.output.as_deref(), &(r.to_json_line() + "\n"))
        }
        Command::Verify(a) => {
            let g = load(&a.graph, a.weights.as_deref(), a.seed)?;
            let (vertices, claimed) = read_solution(&a.solution)?;
            let mut solution = Solution { vertices, weight: 0, optimal: false };
            solution.weight = claimed.unwrap_or_else(|| g.set_weight_of(&solution.vertices));
            if let Err(e) = solution.verify(&g) {
                bail!("invalid solution: {}", external_error(&e));
            }
            println!("valid independent set of {} vertices, weight {}", solution.vertices.len(), solution.weight);
            Ok(())
        }
        Command::GenWeights(a) => {
            let (lo, hi) = parse_range(&a.range)?;
            let (mut g, _) = parse_graph_with_format(&a.graph)?;
            generate_weights(&mut g, a.seed, lo, hi);
            emit(a.output.as_deref(), &write_graph(&g).0)
        }
        Command::Lift(a) => {
            let g = load(&a.graph, a.weights.as_deref(), a.seed)?;
            let text = std::fs::read_to_string(&a.lift).with_context(|| format!("reading {}", a.lift.display()))?;
            let lift = LiftFile::parse(&text)?;
            if lift.original_vertices != g.capacity() {
                bail!("lifting file is for {} vertices, graph has {}", lift.original_vertices, g.capacity());
            }
            let (kernel_solution, _) = read_solution(&a.kernel_solution)?;
            let external: Vec<usize> = kernel_solution.iter().map(|&v| v + 1).collect();
            let solution = Solution::from_vertices(&g, lift.lift(&external)?);
            if let Err(e) = solution.verify(&g) {
                bail!("lifted set is invalid: {}", external_error(&e));
            }
            emit(a.output.as_deref(), &(to_external(&solution.vertices).iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ") + "\n"))
        }
    }
}

/// Error text with 1-based vertex ids.
fn external_error(e: &crate::solution::CertificateError) -> String {
    use crate::solution::CertificateError::*;
    match e {
        UnknownVertex(v) => format!("vertex {} does not exist", v.wrapping_add(1)),
        Duplicate(v) => format!("vertex {} listed twice", v + 1),
        NotIndependent(u, v) => format!("vertices {} and {} are adjacent", u + 1, v + 1),
        WeightMismatch { claimed, actual } => format!("claimed weight {claimed} but the set weighs {actual}"),
    }
}
