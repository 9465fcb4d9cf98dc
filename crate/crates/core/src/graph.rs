//! Immutable directed weighted graph in compressed-sparse-row form.
//!
//! Out-arcs of node `v` occupy slots `offsets[v]..offsets[v + 1]` of the
//! `targets`/`weights` arrays, sorted by target. The arc slot doubles as the
//! arc's identity for randomness keyed per arc. A transposed index (in-arcs
//! grouped by head, pointing back at the forward slots) is kept for the
//! reference engine and for the weighted-cascade and LT constraint code.

use std::fmt;
use std::mem::size_of;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::diffusion::deviate;
use crate::error::{Error, Result};
use crate::scalar::Weight;
use crate::NodeId;

/// Trial index reserved for edge-weight draws, so weight randomness never
/// collides with any simulation trial.
const WEIGHT_STREAM: u64 = u64::MAX;

const TRIVALENCY: [f64; 3] = [0.1, 0.01, 0.001];

/// Raw edges prior to CSR construction.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeList<W = f64> {
    pub directed: bool,
    pub edges: Vec<(u64, u64, Option<W>)>,
    /// Forces the node count; otherwise it is one past the largest id seen.
    pub node_count: Option<usize>,
}

impl<W: Weight> EdgeList<W> {
    pub fn new(directed: bool) -> Self {
        EdgeList {
            directed,
            edges: Vec::new(),
            node_count: None,
        }
    }

    pub fn from_pairs(directed: bool, pairs: impl IntoIterator<Item = (u64, u64)>) -> Self {
        EdgeList {
            directed,
            edges: pairs.into_iter().map(|(u, v)| (u, v, None)).collect(),
            node_count: None,
        }
    }

    pub fn from_weighted(directed: bool, triples: impl IntoIterator<Item = (u64, u64, W)>) -> Self {
        EdgeList {
            directed,
            edges: triples.into_iter().map(|(u, v, w)| (u, v, Some(w))).collect(),
            node_count: None,
        }
    }

    pub fn with_node_count(mut self, n: usize) -> Self {
        self.node_count = Some(n);
        self
    }

    pub fn push(&mut self, u: u64, v: u64, w: Option<W>) {
        self.edges.push((u, v, w));
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// What `build_csr` discarded while cleaning its input.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildStats {
    pub self_loops_dropped: usize,
    pub duplicates_merged: usize,
}

/// Edge-weight assignment models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum WeightModel {
    /// Each arc uniformly one of {0.1, 0.01, 0.001}.
    Tv,
    /// Each arc uniform on [0, 1).
    Ur,
    /// Each arc into `v` weighs `1 / in_degree(v)`.
    Wc,
    /// Keep the weights read from the input.
    File,
}

impl WeightModel {
    pub fn name(self) -> &'static str {
        match self {
            WeightModel::Tv => "tv",
            WeightModel::Ur => "ur",
            WeightModel::Wc => "wc",
            WeightModel::File => "file",
        }
    }
}

impl fmt::Display for WeightModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CsrGraph<W = f64> {
    node_count: usize,
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    weights: Vec<W>,
    in_degree: Vec<u32>,
    // Transpose: in-arcs of `v` are `in_offsets[v]..in_offsets[v + 1]`,
    // ordered by source; each entry names the source and the forward slot.
    in_offsets: Vec<usize>,
    in_sources: Vec<NodeId>,
    in_slots: Vec<usize>,
}

/// Builds a CSR graph from raw edges.
///
/// Undirected edges become two arcs, self-loops are dropped and repeated arcs
/// keep their first occurrence. Missing weights default to 1.
pub fn build_csr<W: Weight>(edges: &EdgeList<W>) -> Result<(CsrGraph<W>, BuildStats)> {
    let mut stats = BuildStats::default();
    let mut max_id: Option<u64> = None;
    let mut arcs: Vec<(NodeId, NodeId, W)> =
        Vec::with_capacity(edges.edges.len() * if edges.directed { 1 } else { 2 });

    for &(u, v, w) in &edges.edges {
        let w = w.unwrap_or_else(W::one);
        if !(w >= W::zero() && w <= W::one()) {
            return Err(Error::WeightOutOfRange {
                source_id: u,
                target: v,
                weight: w.as_f64(),
            });
        }
        max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
        if u == v {
            stats.self_loops_dropped += 1;
            continue;
        }
        let (su, sv) = (to_node(u)?, to_node(v)?);
        arcs.push((su, sv, w));
        if !edges.directed {
            arcs.push((sv, su, w));
        }
    }

    let seen = max_id.map_or(0, |m| m as usize + 1);
    let node_count = match edges.node_count {
        Some(n) if n < seen => {
            return Err(Error::InvalidNode {
                node: seen as u64 - 1,
                node_count: n,
            })
        }
        Some(n) => n,
        None => seen,
    };

    // Stable sort keeps the first occurrence of each repeated arc in front.
    arcs.sort_by_key(|&(u, v, _)| (u, v));
    let before = arcs.len();
    arcs.dedup_by_key(|&mut (u, v, _)| (u, v));
    stats.duplicates_merged = before - arcs.len();

    let mut offsets = vec![0usize; node_count + 1];
    for &(u, _, _) in &arcs {
        offsets[u as usize + 1] += 1;
    }
    for v in 0..node_count {
        offsets[v + 1] += offsets[v];
    }
    let targets = arcs.iter().map(|&(_, v, _)| v).collect();
    let weights = arcs.iter().map(|&(_, _, w)| w).collect();
    Ok((CsrGraph::assemble(node_count, offsets, targets, weights), stats))
}

fn to_node(id: u64) -> Result<NodeId> {
    NodeId::try_from(id).map_err(|_| Error::InvalidNode {
        node: id,
        node_count: NodeId::MAX as usize,
    })
}

impl<W: Weight> CsrGraph<W> {
    /// Builds the graph from raw CSR arrays, checking every invariant.
    pub fn from_parts(
        node_count: usize,
        offsets: Vec<usize>,
        targets: Vec<NodeId>,
        weights: Vec<W>,
    ) -> Result<Self> {
        if offsets.len() != node_count + 1
            || offsets[0] != 0
            || offsets[node_count] != targets.len()
            || weights.len() != targets.len()
            || offsets.windows(2).any(|w| w[0] > w[1])
        {
            return Err(Error::Parameter("malformed CSR offsets".into()));
        }
        for u in 0..node_count {
            let slice = &targets[offsets[u]..offsets[u + 1]];
            for (i, &v) in slice.iter().enumerate() {
                if v as usize >= node_count {
                    return Err(Error::InvalidNode {
                        node: v as u64,
                        node_count,
                    });
                }
                if v as usize == u || (i > 0 && slice[i - 1] >= v) {
                    return Err(Error::Parameter(format!(
                        "node {u}: adjacency must be sorted, loop-free and duplicate-free"
                    )));
                }
                let w = weights[offsets[u] + i];
                if !(w >= W::zero() && w <= W::one()) {
                    return Err(Error::WeightOutOfRange {
                        source_id: u as u64,
                        target: v as u64,
                        weight: w.as_f64(),
                    });
                }
            }
        }
        Ok(Self::assemble(node_count, offsets, targets, weights))
    }

    fn assemble(
        node_count: usize,
        offsets: Vec<usize>,
        targets: Vec<NodeId>,
        weights: Vec<W>,
    ) -> Self {
        let mut in_degree = vec![0u32; node_count];
        for &v in &targets {
            in_degree[v as usize] += 1;
        }
        let mut in_offsets = vec![0usize; node_count + 1];
        for v in 0..node_count {
            in_offsets[v + 1] = in_offsets[v] + in_degree[v] as usize;
        }
        let mut cursor = in_offsets.clone();
        let mut in_sources = vec![0; targets.len()];
        let mut in_slots = vec![0; targets.len()];
        // Scanning sources in ascending order leaves each in-slice sorted by source.
        for u in 0..node_count {
            let range = offsets[u]..offsets[u + 1];
            for (slot, &v) in range.clone().zip(&targets[range]) {
                let v = v as usize;
                in_sources[cursor[v]] = u as NodeId;
                in_slots[cursor[v]] = slot;
                cursor[v] += 1;
            }
        }
        CsrGraph {
            node_count,
            offsets,
            targets,
            weights,
            in_degree,
            in_offsets,
            in_sources,
            in_slots,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn arc_count(&self) -> usize {
        self.targets.len()
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn targets(&self) -> &[NodeId] {
        &self.targets
    }

    pub fn weights(&self) -> &[W] {
        &self.weights
    }

    pub fn in_degrees(&self) -> &[u32] {
        &self.in_degree
    }

    /// Arc slots of `v`'s out-arcs.
    #[inline]
    pub fn out_slots(&self, v: NodeId) -> Range<usize> {
        self.offsets[v as usize]..self.offsets[v as usize + 1]
    }

    #[inline]
    pub fn out_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.targets[self.out_slots(v)]
    }

    #[inline]
    pub fn out_weights(&self, v: NodeId) -> &[W] {
        &self.weights[self.out_slots(v)]
    }

    #[inline]
    pub fn out_degree(&self, v: NodeId) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    #[inline]
    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_degree[v as usize] as usize
    }

    #[inline]
    pub fn target(&self, slot: usize) -> NodeId {
        self.targets[slot]
    }

    #[inline]
    pub fn weight(&self, slot: usize) -> W {
        self.weights[slot]
    }

    /// In-neighbors of `v` (ascending) and the forward slots of those arcs.
    #[inline]
    pub fn in_arcs(&self, v: NodeId) -> (&[NodeId], &[usize]) {
        let r = self.in_offsets[v as usize]..self.in_offsets[v as usize + 1];
        (&self.in_sources[r.clone()], &self.in_slots[r])
    }

    /// Slot of arc `u -> v`, found by binary search in `u`'s sorted slice.
    pub fn find_arc(&self, u: NodeId, v: NodeId) -> Option<usize> {
        let start = self.offsets[u as usize];
        self.out_neighbors(u)
            .binary_search(&v)
            .ok()
            .map(|i| start + i)
    }

    /// All arcs as `(source, target, weight)` in slot order.
    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId, W)> + '_ {
        (0..self.node_count as NodeId).flat_map(move |u| {
            self.out_slots(u)
                .map(move |s| (u, self.targets[s], self.weights[s]))
        })
    }

    /// Directed, weighted dump of the arcs that rebuilds to an identical graph.
    pub fn to_edge_list(&self) -> EdgeList<W> {
        EdgeList {
            directed: true,
            edges: self
                .arcs()
                .map(|(u, v, w)| (u as u64, v as u64, Some(w)))
                .collect(),
            node_count: Some(self.node_count),
        }
    }

    pub fn incoming_weight_sum(&self, v: NodeId) -> W {
        let (_, slots) = self.in_arcs(v);
        slots.iter().map(|&s| self.weights[s]).sum()
    }

    /// Checks the LT requirement that every node's incoming weights sum to at most 1.
    pub fn check_threshold_constraint(&self) -> Result<()> {
        for v in 0..self.node_count as NodeId {
            let sum = self.incoming_weight_sum(v).as_f64();
            if sum > 1.0 + 1e-9 {
                return Err(Error::ThresholdConstraint { node: v, sum });
            }
        }
        Ok(())
    }

    /// Divides the incoming weights of every node whose sum exceeds 1 by that sum.
    pub fn normalize_incoming(&self) -> Self {
        let mut weights = self.weights.clone();
        for v in 0..self.node_count as NodeId {
            let sum = self.incoming_weight_sum(v);
            if sum > W::one() {
                for &s in self.in_arcs(v).1 {
                    weights[s] = weights[s] / sum;
                }
            }
        }
        self.with_weights(weights)
    }

    /// Trivalency model: each arc weight drawn uniformly from {0.1, 0.01, 0.001}.
    pub fn assign_weights_tv(&self, seed: u64) -> Self {
        let weights = (0..self.arc_count())
            .map(|slot| {
                let u = deviate(seed, WEIGHT_STREAM, slot as u64);
                W::from_f64_lossy(TRIVALENCY[((u * 3.0) as usize).min(2)])
            })
            .collect();
        self.with_weights(weights)
    }

    /// Uniform-random model: each arc weight uniform on [0, 1).
    pub fn assign_weights_ur(&self, seed: u64) -> Self {
        let weights = (0..self.arc_count())
            .map(|slot| {
                let w = W::from_f64_lossy(deviate(seed, WEIGHT_STREAM, slot as u64));
                // f32 rounding may land exactly on 1.
                if w >= W::one() {
                    W::one() - W::epsilon()
                } else {
                    w
                }
            })
            .collect();
        self.with_weights(weights)
    }

    /// Weighted-cascade model: arc `(u, v)` gets `1 / in_degree(v)`.
    pub fn assign_weights_wc(&self) -> Self {
        let weights = self
            .targets
            .iter()
            .map(|&v| W::one() / W::from_u32(self.in_degree[v as usize]).unwrap())
            .collect();
        self.with_weights(weights)
    }

    pub fn with_weight_model(&self, model: WeightModel, seed: u64) -> Self {
        match model {
            WeightModel::Tv => self.assign_weights_tv(seed),
            WeightModel::Ur => self.assign_weights_ur(seed),
            WeightModel::Wc => self.assign_weights_wc(),
            WeightModel::File => self.clone(),
        }
    }

    /// Same topology with every weight set to `w`.
    pub fn with_uniform_weight(&self, w: W) -> Self {
        self.with_weights(vec![w; self.arc_count()])
    }

    fn with_weights(&self, weights: Vec<W>) -> Self {
        debug_assert_eq!(weights.len(), self.arc_count());
        CsrGraph {
            weights,
            ..self.clone()
        }
    }

    /// Converts the weights to another scalar type.
    pub fn cast<V: Weight>(&self) -> CsrGraph<V> {
        CsrGraph {
            node_count: self.node_count,
            offsets: self.offsets.clone(),
            targets: self.targets.clone(),
            weights: self
                .weights
                .iter()
                .map(|w| V::from_f64_lossy(w.as_f64()))
                .collect(),
            in_degree: self.in_degree.clone(),
            in_offsets: self.in_offsets.clone(),
            in_sources: self.in_sources.clone(),
            in_slots: self.in_slots.clone(),
        }
    }

    /// Heap bytes held by the graph's arrays.
    pub fn heap_bytes(&self) -> usize {
        let n = self.node_count;
        let m = self.arc_count();
        2 * (n + 1) * size_of::<usize>()
            + n * size_of::<u32>()
            + m * (2 * size_of::<NodeId>() + size_of::<usize>() + size_of::<W>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> EdgeList<f64> {
        EdgeList::from_pairs(false, [(0, 1), (1, 2), (0, 2)])
    }

    #[test]
    fn undirected_triangle_doubles_arcs() {
        let (g, stats) = build_csr(&triangle()).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.arc_count(), 6);
        assert_eq!(stats, BuildStats::default());
        assert_eq!(g.out_neighbors(0), &[1, 2]);
        assert_eq!(g.in_degrees(), &[2, 2, 2]);
    }

    #[test]
    fn duplicates_merged_and_loops_dropped() {
        let edges = EdgeList::<f64>::from_pairs(true, [(0, 1), (0, 1), (1, 1)]);
        let (g, stats) = build_csr(&edges).unwrap();
        assert_eq!(g.arc_count(), 1);
        assert_eq!(stats.duplicates_merged, 1);
        assert_eq!(stats.self_loops_dropped, 1);
        assert_eq!(g.node_count(), 2);
    }

    #[test]
    fn duplicate_keeps_first_weight() {
        let edges = EdgeList::from_weighted(true, [(0, 1, 0.3), (0, 1, 0.9)]);
        let (g, _) = build_csr(&edges).unwrap();
        assert_eq!(g.weights(), &[0.3]);
    }

    #[test]
    fn out_of_range_weight_names_arc() {
        let edges = EdgeList::from_weighted(true, [(0, 1, 0.5), (4, 2, 1.5)]);
        match build_csr(&edges) {
            Err(Error::WeightOutOfRange {
                source_id, target, ..
            }) => assert_eq!((source_id, target), (4, 2)),
            other => panic!("expected weight error, got {other:?}"),
        }
        let nan = EdgeList::from_weighted(true, [(0, 1, f64::NAN)]);
        assert!(build_csr(&nan).is_err());
    }

    #[test]
    fn node_count_override() {
        let (g, _) = build_csr(&EdgeList::<f64>::from_pairs(true, [(0, 1)]).with_node_count(5)).unwrap();
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.offsets(), &[0, 1, 1, 1, 1, 1]);
        assert!(build_csr(&EdgeList::<f64>::from_pairs(true, [(0, 7)]).with_node_count(5)).is_err());
    }

    #[test]
    fn empty_input() {
        let (g, _) = build_csr(&EdgeList::<f64>::new(true)).unwrap();
        assert_eq!(g.node_count(), 0);
        assert_eq!(g.arc_count(), 0);
    }

    #[test]
    fn find_arc_and_transpose() {
        let (g, _) = build_csr(&EdgeList::<f64>::from_pairs(true, [(2, 0), (0, 1), (1, 0), (0, 2)])).unwrap();
        assert_eq!(g.find_arc(0, 2), Some(1));
        assert_eq!(g.find_arc(2, 1), None);
        let (srcs, slots) = g.in_arcs(0);
        assert_eq!(srcs, &[1, 2]);
        for (&u, &s) in srcs.iter().zip(slots) {
            assert_eq!(g.find_arc(u, 0), Some(s));
        }
    }

    #[test]
    fn from_parts_rejects_unsorted_slice() {
        assert!(CsrGraph::<f64>::from_parts(3, vec![0, 2, 2, 2], vec![2, 1], vec![0.5, 0.5]).is_err());
        assert!(CsrGraph::<f64>::from_parts(3, vec![0, 2, 2, 2], vec![1, 2], vec![0.5, 0.5]).is_ok());
        assert!(CsrGraph::<f64>::from_parts(2, vec![0, 1, 1], vec![0], vec![0.5]).is_err());
    }

    #[test]
    fn wc_on_path_and_star() {
        let (path, _) = build_csr(&EdgeList::<f64>::from_pairs(true, [(0, 1), (1, 2)])).unwrap();
        assert_eq!(path.assign_weights_wc().weights(), &[1.0, 1.0]);

        let (star, _) =
            build_csr(&EdgeList::<f64>::from_pairs(true, [(1, 0), (2, 0), (3, 0), (4, 0)])).unwrap();
        let wc = star.assign_weights_wc();
        assert!(wc.weights().iter().all(|&w| w == 0.25));
        assert_eq!(wc.incoming_weight_sum(0), 1.0);
    }

    #[test]
    fn tv_and_ur_deterministic() {
        let (g, _) = build_csr(&triangle()).unwrap();
        assert_eq!(g.assign_weights_tv(3), g.assign_weights_tv(3));
        assert_eq!(g.assign_weights_ur(3), g.assign_weights_ur(3));
        assert_ne!(g.assign_weights_ur(3), g.assign_weights_ur(4));
        assert!(g
            .assign_weights_tv(9)
            .weights()
            .iter()
            .all(|w| TRIVALENCY.contains(w)));
    }

    #[test]
    fn threshold_constraint_and_normalize() {
        let edges = EdgeList::<f64>::from_weighted(true, [(0, 2, 0.7), (1, 2, 0.6), (0, 1, 0.2)]);
        let (g, _) = build_csr(&edges).unwrap();
        match g.check_threshold_constraint() {
            Err(Error::ThresholdConstraint { node, .. }) => assert_eq!(node, 2),
            other => panic!("{other:?}"),
        }
        let n = g.normalize_incoming();
        n.check_threshold_constraint().unwrap();
        assert!((n.incoming_weight_sum(2) - 1.0).abs() < 1e-12);
        // Nodes already within the constraint are left alone.
        assert_eq!(n.incoming_weight_sum(1), 0.2);
    }

    #[test]
    fn cast_to_f32() {
        let (g, _) = build_csr(&triangle()).unwrap();
        let g32: CsrGraph<f32> = g.assign_weights_wc().cast();
        assert_eq!(g32.weights(), &[0.5f32; 6]);
        assert!(g32.heap_bytes() < g.heap_bytes());
    }
}
