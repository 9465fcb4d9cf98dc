//! Live-edge view of IC: keep each arc whose coin succeeds, then the IC
//! outcome is exactly the set reachable from the seeds over kept arcs.

use std::collections::VecDeque;

use crate::error::Result;
use crate::scalar::Weight;
use crate::NodeId;

use super::{ModelKind, ModelSpec, TrialPlan};

/// Nodes reachable from `seeds` in the live-edge graph of `plan`, ascending.
pub fn live_edge_reachability<W: Weight>(
    spec: &ModelSpec<'_, W>,
    seeds: &[NodeId],
    plan: TrialPlan,
) -> Result<Vec<NodeId>> {
    spec.expect(ModelKind::Ic)?;
    let g = spec.graph();
    let n = g.node_count();

    let mut live: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for (slot, (u, v, p)) in g.arcs().enumerate() {
        if plan.coin(slot, p.as_f64()) {
            live[u as usize].push(v);
        }
    }

    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &s in seeds {
        if !std::mem::replace(&mut seen[s as usize], true) {
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &v in &live[u as usize] {
            if !std::mem::replace(&mut seen[v as usize], true) {
                queue.push_back(v);
            }
        }
    }
    Ok((0..n as NodeId).filter(|&v| seen[v as usize]).collect())
}
