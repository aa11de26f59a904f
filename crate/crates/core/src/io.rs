//! File formats.
//!
//! Graph files: a header `n m [fmt]` followed by one line per vertex. With
//! `fmt = 10` each vertex line starts with the integer weight (at least 1);
//! with `fmt = 0` (or no fmt) there is no weight and every vertex weighs 1.
//! The remaining tokens are 1-based neighbour ids. Lines starting with `%`
//! are comments. Every edge must be listed from both endpoints.
//!
//! Result records are single JSON-object lines; convergence logs are CSV
//! with header `elapsed_seconds,weight`. Vertex ids in every file are
//! 1-based.

use std::fmt::Write as _;
use std::path::Path;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Vertex, Weight, WeightedGraph};
use crate::local_search::ConvergencePoint;
use crate::reduce::{lift_solution, FoldRecord, KernelResult, Lift, LiftError, RecordKind};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("cannot read {path}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}: invalid token `{token}`")]
    InvalidToken { line: usize, token: String },
    #[error("line {line}: vertex weight must be an integer of at least 1, found `{token}`")]
    InvalidWeight { line: usize, token: String },
    #[error("line {line}: neighbour id {id} out of range 1..={n}")]
    NeighborOutOfRange { line: usize, id: u64, n: usize },
    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("line {line}: neighbour {neighbor} listed twice for vertex {vertex}")]
    DuplicateNeighbor { line: usize, vertex: usize, neighbor: usize },
    #[error("line {line}: vertex {vertex} lists {neighbor} but not the reverse")]
    Asymmetric { line: usize, vertex: usize, neighbor: usize },
    #[error("line {line}: expected {expected} vertex lines, found {found}")]
    VertexCount { line: usize, expected: usize, found: usize },
    #[error("line {line}: header declares {expected} edges, body has {found}")]
    EdgeCount { line: usize, expected: usize, found: usize },
}

impl ParseError {
    /// Line the error refers to, if any.
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::Io { .. } => None,
            ParseError::MalformedHeader { line, .. }
            | ParseError::InvalidToken { line, .. }
            | ParseError::InvalidWeight { line, .. }
            | ParseError::NeighborOutOfRange { line, .. }
            | ParseError::SelfLoop { line, .. }
            | ParseError::DuplicateNeighbor { line, .. }
            | ParseError::Asymmetric { line, .. }
            | ParseError::VertexCount { line, .. }
            | ParseError::EdgeCount { line, .. } => Some(*line),
        }
    }
}

fn read(path: &Path) -> Result<String, ParseError> {
    std::fs::read_to_string(path).map_err(|source| ParseError::Io { path: path.display().to_string(), source })
}

pub fn parse_graph(path: &Path) -> Result<WeightedGraph, ParseError> {
    parse_str(&read(path)?)
}

/// Whether the file carried vertex weights.
pub fn parse_graph_with_format(path: &Path) -> Result<(WeightedGraph, bool), ParseError> {
    parse_with_format(&read(path)?)
}

pub fn parse_str(text: &str) -> Result<WeightedGraph, ParseError> {
    parse_with_format(text).map(|(g, _)| g)
}

fn parse_with_format(text: &str) -> Result<(WeightedGraph, bool), ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.starts_with('%'));
    let (header_line, header) = lines
        .by_ref()
        .find(|(_, l)| !l.trim().is_empty())
        .ok_or(ParseError::MalformedHeader { line: 1, reason: "missing header".into() })?;
    let malformed = |reason: &str| ParseError::MalformedHeader { line: header_line, reason: reason.into() };
    let fields: Vec<&str> = header.split_whitespace().collect();
    if !(2..=3).contains(&fields.len()) {
        return Err(malformed("expected `n m [fmt]`"));
    }
    let n: usize = fields[0].parse().map_err(|_| malformed("vertex count is not a number"))?;
    let m: usize = fields[1].parse().map_err(|_| malformed("edge count is not a number"))?;
    let weighted = match fields.get(2).copied() {
        None | Some("0") | Some("00") | Some("000") => false,
        Some("10") | Some("010") => true,
        Some(other) => return Err(malformed(&format!("unsupported fmt `{other}` (expected 0 or 10)"))),
    };

    let mut weights = Vec::with_capacity(n);
    let mut adjacency: Vec<Vec<Vertex>> = Vec::with_capacity(n);
    let mut line_of = Vec::with_capacity(n);
    let mut last_line = header_line;
    for (line, body) in lines {
        last_line = line;
        let v = adjacency.len();
        if v == n {
            if body.trim().is_empty() {
                continue;
            }
            return Err(ParseError::VertexCount { line, expected: n, found: n + 1 });
        }
        let mut tokens = body.split_whitespace();
        let weight = if weighted {
            let token = tokens.next().unwrap_or("");
            match token.parse::<Weight>() {
                Ok(w) if w >= 1 => w,
                _ => return Err(ParseError::InvalidWeight { line, token: token.into() }),
            }
        } else {
            1
        };
        let mut nbrs = Vec::new();
        for token in tokens {
            let id: u64 = token.parse().map_err(|_| ParseError::InvalidToken { line, token: token.into() })?;
            if id == 0 || id > n as u64 {
                return Err(ParseError::NeighborOutOfRange { line, id, n });
            }
            let u = id as usize - 1;
            if u == v {
                return Err(ParseError::SelfLoop { line, vertex: v + 1 });
            }
            nbrs.push(u);
        }
        nbrs.sort_unstable();
        if let Some(w) = nbrs.windows(2).find(|w| w[0] == w[1]) {
            return Err(ParseError::DuplicateNeighbor { line, vertex: v + 1, neighbor: w[0] + 1 });
        }
        weights.push(weight);
        adjacency.push(nbrs);
        line_of.push(line);
    }
    if adjacency.len() < n {
        return Err(ParseError::VertexCount { line: last_line, expected: n, found: adjacency.len() });
    }

    let mut edges = Vec::new();
    for (v, nbrs) in adjacency.iter().enumerate() {
        for &u in nbrs {
            if adjacency[u].binary_search(&v).is_err() {
                return Err(ParseError::Asymmetric { line: line_of[v], vertex: v + 1, neighbor: u + 1 });
            }
            if v < u {
                edges.push((v, u));
            }
        }
    }
    if edges.len() != m {
        return Err(ParseError::EdgeCount { line: header_line, expected: m, found: edges.len() });
    }
    let g = WeightedGraph::from_edges(weights, &edges).expect("validated input");
    Ok((g, weighted))
}

/// Serializes the alive vertices of `g` with compact 1-based ids in `fmt 10`.
/// Returns the text and the internal id of each file vertex.
pub fn write_graph(g: &WeightedGraph) -> (String, Vec<Vertex>) {
    let ids: Vec<Vertex> = g.vertices().collect();
    let mut index = vec![usize::MAX; g.capacity()];
    for (i, &v) in ids.iter().enumerate() {
        index[v] = i + 1;
    }
    let mut out = String::new();
    writeln!(out, "{} {} 10", ids.len(), g.edge_count()).unwrap();
    for &v in &ids {
        write!(out, "{}", g.weight(v)).unwrap();
        let mut nbrs: Vec<usize> = g.neighbors(v).iter().map(|&u| index[u]).collect();
        nbrs.sort_unstable();
        for u in nbrs {
            write!(out, " {u}").unwrap();
        }
        out.push('\n');
    }
    (out, ids)
}

/// Draws `n` weights uniformly from `[lo, hi]`.
///
/// Generator: ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64(seed)`),
/// one `next_u64` per attempt. With `range = hi - lo + 1`, draws below
/// `(2^64 - range) mod range` are rejected and the weight is
/// `lo + x mod range`, so every value is equally likely. When the range
/// covers all of `u64` the raw draw is used.
pub fn weight_sequence(n: usize, seed: u64, lo: Weight, hi: Weight) -> Vec<Weight> {
    assert!(lo >= 1 && hi >= lo, "weights need 1 <= lo <= hi");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let range = (hi - lo).wrapping_add(1);
    (0..n)
        .map(|_| {
            if range == 0 {
                return rng.next_u64();
            }
            let threshold = range.wrapping_neg() % range;
            loop {
                let x = rng.next_u64();
                if x >= threshold {
                    return lo + x % range;
                }
            }
        })
        .collect()
}

/// Overwrites every vertex weight of a freshly loaded graph.
pub fn generate_weights(g: &mut WeightedGraph, seed: u64, lo: Weight, hi: Weight) {
    let weights = weight_sequence(g.capacity(), seed, lo, hi);
    for (v, w) in weights.into_iter().enumerate() {
        if g.is_alive(v) {
            g.set_weight(v, w).expect("alive vertex");
        }
    }
    g.clear_log();
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub instance: String,
    pub weight: Weight,
    pub optimal: bool,
    pub elapsed_seconds: f64,
    pub seed: u64,
    pub variant: String,
    pub kernel_n: usize,
    pub kernel_m: usize,
    /// 1-based vertex ids, ascending.
    pub solution: Vec<usize>,
}

impl ResultRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    pub fn from_json_line(line: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(line.trim())
    }

    /// The record with the elapsed time zeroed, for run-to-run comparison.
    pub fn without_timing(&self) -> Self {
        Self { elapsed_seconds: 0.0, ..self.clone() }
    }

    /// 0-based vertex ids.
    pub fn vertices(&self) -> Vec<Vertex> {
        self.solution.iter().map(|&v| v.wrapping_sub(1)).collect()
    }
}

pub fn to_external(vertices: &[Vertex]) -> Vec<usize> {
    vertices.iter().map(|&v| v + 1).collect()
}

pub fn convergence_csv(points: &[ConvergencePoint]) -> String {
    let mut out = String::from("elapsed_seconds,weight\n");
    for p in points {
        writeln!(out, "{:.6},{}", p.elapsed, p.weight).unwrap();
    }
    out
}

#[derive(Debug, Error)]
pub enum SolutionFileError {
    #[error("cannot read {path}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid result record: {0}")]
    Json(#[from] serde_json::Error),
    #[error("line {line}: invalid vertex id `{token}`")]
    InvalidId { line: usize, token: String },
}

/// A solution file: either a result record line or whitespace-separated
/// 1-based ids. Returns 0-based ids and the claimed weight, if any.
pub fn parse_solution(text: &str) -> Result<(Vec<Vertex>, Option<Weight>), SolutionFileError> {
    if text.trim_start().starts_with('{') {
        let record = ResultRecord::from_json_line(text.lines().find(|l| !l.trim().is_empty()).unwrap_or(""))?;
        return Ok((record.vertices(), Some(record.weight)));
    }
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.starts_with('%') {
            continue;
        }
        for token in line.split_whitespace() {
            match token.parse::<usize>() {
                Ok(id) if id >= 1 => out.push(id - 1),
                _ => return Err(SolutionFileError::InvalidId { line: i + 1, token: token.into() }),
            }
        }
    }
    Ok((out, None))
}

pub fn read_solution(path: &Path) -> Result<(Vec<Vertex>, Option<Weight>), SolutionFileError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| SolutionFileError::Io { path: path.display().to_string(), source })?;
    parse_solution(&text)
}

/// Everything needed to lift a solution of an exported kernel file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftFile {
    pub original_vertices: usize,
    pub offset: Weight,
    /// Internal id of each kernel file vertex (file id `i + 1`).
    pub kernel_map: Vec<Vertex>,
    pub stack: Vec<FoldRecord>,
}

#[derive(Debug, Error)]
pub enum LiftFileError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("kernel vertex {0} out of range")]
    UnknownKernelVertex(usize),
    #[error(transparent)]
    Lift(#[from] LiftError),
}

impl LiftFile {
    pub fn from_kernel(kernel: &KernelResult, kernel_map: Vec<Vertex>) -> Self {
        Self {
            original_vertices: kernel.original_vertex_count,
            offset: kernel.offset,
            kernel_map,
            stack: kernel.stack.clone(),
        }
    }

    /// Maps 1-based kernel file ids to 0-based ids of the original graph.
    pub fn lift(&self, kernel_solution: &[usize]) -> Result<Vec<Vertex>, LiftFileError> {
        let internal = kernel_solution
            .iter()
            .map(|&id| {
                id.checked_sub(1)
                    .and_then(|i| self.kernel_map.get(i).copied())
                    .ok_or(LiftFileError::UnknownKernelVertex(id))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(lift_solution(&internal, &self.stack)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("mwis-lift 1\n");
        writeln!(out, "original_vertices {}", self.original_vertices).unwrap();
        writeln!(out, "offset {}", self.offset).unwrap();
        write!(out, "kernel_map {}", self.kernel_map.len()).unwrap();
        for v in &self.kernel_map {
            write!(out, " {v}").unwrap();
        }
        out.push('\n');
        writeln!(out, "records {}", self.stack.len()).unwrap();
        for r in &self.stack {
            let introduced = r.introduced.map_or("-".to_string(), |v| v.to_string());
            let payload = match &r.lift {
                Lift::Take(vs) => format!("take {}", ids(vs)),
                Lift::Nothing => "none".to_string(),
                Lift::Fold { folded, if_folded, otherwise } => {
                    format!("fold {folded} {} {}", ids(if_folded), ids(otherwise))
                }
                Lift::Transfer { vertex, guard } => format!("transfer {vertex} {}", ids(guard)),
            };
            writeln!(out, "{} {} {} {} {}", r.kind, r.offset, introduced, ids(&r.consumed), payload).unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, LiftFileError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next = |what: &str| -> Result<(usize, Vec<String>), LiftFileError> {
            let (line, body) = lines
                .next()
                .ok_or_else(|| LiftFileError::Malformed { line: 0, reason: format!("missing {what}") })?;
            Ok((line, body.split_whitespace().map(str::to_string).collect()))
        };
        let bad = |line: usize, reason: &str| LiftFileError::Malformed { line, reason: reason.into() };

        let (line, header) = next("header")?;
        if header != ["mwis-lift", "1"] {
            return Err(bad(line, "expected `mwis-lift 1`"));
        }
        let keyed = |line: usize, fields: &[String], key: &str| -> Result<u64, LiftFileError> {
            match fields {
                [k, v, ..] if k == key => v.parse().map_err(|_| bad(line, &format!("bad {key}"))),
                _ => Err(bad(line, &format!("expected `{key}`"))),
            }
        };
        let (line, f) = next("original_vertices")?;
        let original_vertices = keyed(line, &f, "original_vertices")? as usize;
        let (line, f) = next("offset")?;
        let offset = keyed(line, &f, "offset")?;
        let (line, f) = next("kernel_map")?;
        let k = keyed(line, &f, "kernel_map")? as usize;
        if f.len() != k + 2 {
            return Err(bad(line, "kernel_map length mismatch"));
        }
        let kernel_map = f[2..].iter().map(|t| t.parse().map_err(|_| bad(line, "bad kernel id"))).collect::<Result<_, _>>()?;
        let (line, f) = next("records")?;
        let count = keyed(line, &f, "records")? as usize;
        let mut stack = Vec::with_capacity(count);
        for _ in 0..count {
            let (line, f) = next("record")?;
            stack.push(parse_record(line, &f)?);
        }
        Ok(Self { original_vertices, offset, kernel_map, stack })
    }
}

fn ids(vs: &[Vertex]) -> String {
    if vs.is_empty() {
        return "-".into();
    }
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_ids(line: usize, token: &str) -> Result<Vec<Vertex>, LiftFileError> {
    if token == "-" {
        return Ok(Vec::new());
    }
    token
        .split(',')
        .map(|t| t.parse().map_err(|_| LiftFileError::Malformed { line, reason: format!("bad id list `{token}`") }))
        .collect()
}

fn parse_record(line: usize, f: &[String]) -> Result<FoldRecord, LiftFileError> {
    let bad = |reason: &str| LiftFileError::Malformed { line, reason: reason.into() };
    if f.len() < 5 {
        return Err(bad("record needs kind, offset, introduced, consumed and payload"));
    }
    let kind = RecordKind::from_name(&f[0]).ok_or_else(|| bad("unknown record kind"))?;
    let offset = f[1].parse().map_err(|_| bad("bad offset"))?;
    let introduced = match f[2].as_str() {
        "-" => None,
        t => Some(t.parse().map_err(|_| bad("bad introduced id"))?),
    };
    let consumed = parse_ids(line, &f[3])?;
    let vertex = |t: &str| t.parse::<Vertex>().map_err(|_| bad("bad vertex id"));
    let lift = match (f[4].as_str(), &f[5..]) {
        ("take", [vs]) => Lift::Take(parse_ids(line, vs)?),
        ("none", []) => Lift::Nothing,
        ("fold", [folded, a, b]) => {
            Lift::Fold { folded: vertex(folded)?, if_folded: parse_ids(line, a)?, otherwise: parse_ids(line, b)? }
        }
        ("transfer", [v, guard]) => Lift::Transfer { vertex: vertex(v)?, guard: parse_ids(line, guard)? },
        _ => return Err(bad("malformed lift payload")),
    };
    Ok(FoldRecord { kind, offset, consumed, introduced, lift })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_weighted_path() {
        let g = parse_str("3 2 10\n5 2\n7 1 3\n2 2\n").unwrap();
        assert_eq!((g.weight(0), g.weight(1), g.weight(2)), (5, 7, 2));
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn comments_blank_isolated_and_unweighted() {
        let g = parse_str("% comment\n3 1\n2\n1\n\n").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.degree(2), 0);
        assert_eq!(g.weight(0), 1);
    }

    #[test]
    fn distinct_errors_with_lines() {
        let cases: [(&str, fn(&ParseError) -> bool, usize); 8] = [
            ("3 x 10\n", |e| matches!(e, ParseError::MalformedHeader { .. }), 1),
            ("2 1 10\n0 2\n1 1\n", |e| matches!(e, ParseError::InvalidWeight { .. }), 2),
            ("2 1 10\n1 3\n1 1\n", |e| matches!(e, ParseError::NeighborOutOfRange { .. }), 2),
            ("2 1 10\n1 2\n1\n", |e| matches!(e, ParseError::Asymmetric { .. }), 2),
            ("2 1 10\n1 2\n1 1 2\n", |e| matches!(e, ParseError::SelfLoop { .. }), 3),
            ("2 1 10\n1 2 2\n1 1\n", |e| matches!(e, ParseError::DuplicateNeighbor { .. }), 2),
            ("2 2 10\n1 2\n1 1\n", |e| matches!(e, ParseError::EdgeCount { .. }), 1),
            ("3 0\n\n", |e| matches!(e, ParseError::VertexCount { .. }), 2),
        ];
        for (text, check, line) in cases {
            let err = parse_str(text).unwrap_err();
            assert!(check(&err), "{text:?} gave {err}");
            assert_eq!(err.line(), Some(line), "{text:?} gave {err}");
        }
    }

    #[test]
    fn write_then_parse_round_trips() {
        let g = parse_str("4 3 10\n5 2\n7 1 3 4\n2 2\n9 2\n").unwrap();
        let (text, map) = write_graph(&g);
        assert_eq!(map, vec![0, 1, 2, 3]);
        assert_eq!(parse_str(&text).unwrap().canonical_serialization(), g.canonical_serialization());
    }

    #[test]
    fn weight_generator_contract() {
        assert!(weight_sequence(50, 3, 7, 7).iter().all(|&w| w == 7));
        assert_eq!(weight_sequence(100, 42, 1, 200), weight_sequence(100, 42, 1, 200));
        assert_ne!(weight_sequence(100, 42, 1, 200), weight_sequence(100, 43, 1, 200));
        let draws = weight_sequence(100_000, 9, 1, 200);
        assert!(draws.iter().all(|&w| (1..=200).contains(&w)));
        let mean = draws.iter().sum::<u64>() as f64 / draws.len() as f64;
        assert!((mean - 100.5).abs() <= 0.01 * 100.5, "mean {mean}");
    }

    #[test]
    fn record_round_trip() {
        let r = ResultRecord {
            instance: "x".into(),
            weight: 5,
            optimal: true,
            elapsed_seconds: 0.25,
            seed: 1,
            variant: "full".into(),
            kernel_n: 0,
            kernel_m: 0,
            solution: vec![1],
        };
        assert_eq!(ResultRecord::from_json_line(&r.to_json_line()).unwrap(), r);
        assert_eq!(parse_solution(&r.to_json_line()).unwrap(), (vec![0], Some(5)));
        assert_eq!(parse_solution("1 3\n4\n").unwrap(), (vec![0, 2, 3], None));
    }

    #[test]
    fn lift_file_round_trip() {
        let file = LiftFile {
            original_vertices: 5,
            offset: 9,
            kernel_map: vec![3, 5],
            stack: vec![
                FoldRecord {
                    kind: RecordKind::Reduction(crate::reduce::Rule::VertexFolding),
                    offset: 2,
                    consumed: vec![0, 1, 2],
                    introduced: Some(5),
                    lift: Lift::Fold { folded: 5, if_folded: vec![0, 2], otherwise: vec![1] },
                },
                FoldRecord {
                    kind: RecordKind::Reduction(crate::reduce::Rule::NeighborhoodRemoval),
                    offset: 7,
                    consumed: vec![4],
                    introduced: None,
                    lift: Lift::Take(vec![4]),
                },
            ],
        };
        let parsed = LiftFile::parse(&file.to_text()).unwrap();
        assert_eq!(parsed, file);
        assert_eq!(parsed.lift(&[2]).unwrap(), vec![0, 2, 4]);
        assert_eq!(parsed.lift(&[]).unwrap(), vec![1, 4]);
    }
}
