use std::fmt;

use thiserror::Error;

use crate::graph::{Vertex, Weight};

use super::Rule;

/// What produced a stack entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RecordKind {
    Reduction(Rule),
    /// Inclusion decided by the branching step of the solver.
    Branch,
}

impl RecordKind {
    pub fn name(self) -> &'static str {
        match self {
            RecordKind::Reduction(rule) => rule.name(),
            RecordKind::Branch => "branch",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        if name == "branch" {
            return Some(RecordKind::Branch);
        }
        Rule::ALL.iter().find(|r| r.name() == name).map(|&r| RecordKind::Reduction(r))
    }
}

impl fmt::Display for RecordKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How a solution of the graph after the record maps to one before it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lift {
    /// Add these vertices unconditionally.
    Take(Vec<Vertex>),
    /// Removed vertices are simply absent from the solution.
    Nothing,
    /// If `folded` is selected replace it by `if_folded`, otherwise add
    /// `otherwise`.
    Fold { folded: Vertex, if_folded: Vec<Vertex>, otherwise: Vec<Vertex> },
    /// Add `vertex` unless some vertex of `guard` is selected.
    Transfer { vertex: Vertex, guard: Vec<Vertex> },
}

/// One entry of the lifting stack.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldRecord {
    pub kind: RecordKind,
    /// Weight this record adds to the offset.
    pub offset: Weight,
    pub consumed: Vec<Vertex>,
    pub introduced: Option<Vertex>,
    pub lift: Lift,
}

impl FoldRecord {
    fn max_id(&self) -> Option<Vertex> {
        let lift_max = match &self.lift {
            Lift::Take(vs) => vs.iter().max().copied(),
            Lift::Nothing => None,
            Lift::Fold { folded, if_folded, otherwise } => {
                if_folded.iter().chain(otherwise).chain(std::iter::once(folded)).max().copied()
            }
            Lift::Transfer { vertex, guard } => guard.iter().chain(std::iter::once(vertex)).max().copied(),
        };
        self.consumed.iter().copied().chain(self.introduced).chain(lift_max).max()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LiftError {
    #[error("kernel solution is not independent: {0} and {1} are adjacent")]
    NotIndependent(Vertex, Vertex),
    #[error("vertex {0} is not part of the kernel")]
    NotInKernel(Vertex),
    #[error("record for {0} would select a vertex twice")]
    Inconsistent(&'static str),
}

/// Unwinds `stack` (last record first) over `kernel_solution` and returns the
/// resulting vertex set, sorted.
pub fn lift_solution(kernel_solution: &[Vertex], stack: &[FoldRecord]) -> Result<Vec<Vertex>, LiftError> {
    let capacity = stack
        .iter()
        .filter_map(FoldRecord::max_id)
        .chain(kernel_solution.iter().copied())
        .max()
        .map_or(0, |m| m + 1);
    let mut selected = vec![false; capacity];
    for &v in kernel_solution {
        selected[v] = true;
    }
    let select = |selected: &mut Vec<bool>, vs: &[Vertex], kind: RecordKind| -> Result<(), LiftError> {
        for &v in vs {
            if selected[v] {
                return Err(LiftError::Inconsistent(kind.name()));
            }
            selected[v] = true;
        }
        Ok(())
    };
    for record in stack.iter().rev() {
        match &record.lift {
            Lift::Take(vs) => select(&mut selected, vs, record.kind)?,
            Lift::Nothing => {}
            Lift::Fold { folded, if_folded, otherwise } => {
                if selected[*folded] {
                    selected[*folded] = false;
                    select(&mut selected, if_folded, record.kind)?;
                } else {
                    select(&mut selected, otherwise, record.kind)?;
                }
            }
            Lift::Transfer { vertex, guard } => {
                if !guard.iter().any(|&x| selected[x]) {
                    select(&mut selected, &[*vertex], record.kind)?;
                }
            }
        }
    }
    Ok(selected.iter().enumerate().filter_map(|(v, &s)| s.then_some(v)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(lift: Lift) -> FoldRecord {
        FoldRecord { kind: RecordKind::Branch, offset: 0, consumed: vec![], introduced: None, lift }
    }

    #[test]
    fn forced_vertices_only() {
        let stack = vec![record(Lift::Take(vec![0])), record(Lift::Take(vec![2]))];
        assert_eq!(lift_solution(&[], &stack).unwrap(), vec![0, 2]);
    }

    #[test]
    fn folded_vertex_expands() {
        // u=0, v=1, x=2 folded into 3
        let stack = vec![record(Lift::Fold { folded: 3, if_folded: vec![0, 2], otherwise: vec![1] })];
        assert_eq!(lift_solution(&[3], &stack).unwrap(), vec![0, 2]);
        assert_eq!(lift_solution(&[], &stack).unwrap(), vec![1]);
    }

    #[test]
    fn transfer_respects_guard() {
        let stack = vec![record(Lift::Transfer { vertex: 0, guard: vec![2] })];
        assert_eq!(lift_solution(&[2], &stack).unwrap(), vec![2]);
        assert_eq!(lift_solution(&[3], &stack).unwrap(), vec![0, 3]);
    }

    #[test]
    fn nested_folds_unwind_lifo() {
        // first fold 0,1,2 -> 5; later 5,3,4 -> 6 with 5 on the "if folded" side
        let stack = vec![
            record(Lift::Fold { folded: 5, if_folded: vec![0, 2], otherwise: vec![1] }),
            record(Lift::Fold { folded: 6, if_folded: vec![5, 4], otherwise: vec![3] }),
        ];
        assert_eq!(lift_solution(&[6], &stack).unwrap(), vec![0, 2, 4]);
        assert_eq!(lift_solution(&[], &stack).unwrap(), vec![1, 3]);
    }

    #[test]
    fn kind_names_round_trip() {
        for rule in Rule::ALL {
            let kind = RecordKind::Reduction(rule);
            assert_eq!(RecordKind::from_name(kind.name()), Some(kind));
        }
        assert_eq!(RecordKind::from_name("branch"), Some(RecordKind::Branch));
        assert_eq!(RecordKind::from_name("nope"), None);
    }
}
