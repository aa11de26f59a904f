//! Critical weighted sets via minimum cut on the bipartite double cover.
//!
//! Network: `s -> l(v)` and `r(v) -> t` with capacity `w(v)`, and an
//! unbounded arc `l(u) -> r(v)` for every ordered adjacent pair. A finite cut
//! selecting `U = {v : l(v) on the source side}` must also put `r(N(U))` on
//! the source side, so its capacity is `w(V) - w(U) + w(N(U))`. The minimum
//! cut therefore maximises `w(U) - w(N(U))`.

use thiserror::Error;

use crate::flow::FlowNetwork;
use crate::graph::{Vertex, WeightedGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("min-cut certificate failed: flow value {flow_value} but cut evaluates to {cut_value}")]
pub struct CutCertificateError {
    pub flow_value: i64,
    pub cut_value: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalSet {
    /// Inclusion-minimal maximiser of `w(U) - w(N(U))`.
    pub set: Vec<Vertex>,
    pub value: i64,
    /// `set \ N(set)`, a critical weighted independent set.
    pub independent: Vec<Vertex>,
}

pub fn critical_set(g: &WeightedGraph) -> Result<CriticalSet, CutCertificateError> {
    let ids: Vec<Vertex> = g.vertices().collect();
    let k = ids.len();
    if k == 0 {
        return Ok(CriticalSet { set: vec![], value: 0, independent: vec![] });
    }
    let mut local = vec![usize::MAX; g.capacity()];
    for (i, &v) in ids.iter().enumerate() {
        local[v] = i;
    }
    let (s, t) = (2 * k, 2 * k + 1);
    let total = g.total_weight();
    let unbounded = total + 1;
    let mut net = FlowNetwork::new(2 * k + 2);
    for (i, &v) in ids.iter().enumerate() {
        net.add_arc(s, i, g.weight(v));
        net.add_arc(k + i, t, g.weight(v));
        for &u in g.neighbors(v) {
            net.add_arc(i, k + local[u], unbounded);
        }
    }
    let flow = net.max_flow(s, t);
    let side = net.source_side(s);

    let set: Vec<Vertex> = (0..k).filter(|&i| side[i]).map(|i| ids[i]).collect();
    let neighborhood_weight: u64 = (0..k).filter(|&i| side[k + i]).map(|i| g.weight(ids[i])).sum();
    let independent: Vec<Vertex> = (0..k).filter(|&i| side[i] && !side[k + i]).map(|i| ids[i]).collect();

    let flow_value = total as i64 - flow as i64;
    let cut_value = g.set_weight_of(&set) as i64 - neighborhood_weight as i64;
    if flow_value != cut_value {
        return Err(CutCertificateError { flow_value, cut_value });
    }
    Ok(CriticalSet { set, value: flow_value, independent })
}
