//! Edge-list ingestion, result exports and JSON reports.
//!
//! Edge lists are SNAP-style: one `u v` or `u v w` per line, whitespace
//! separated, `#` starts a comment line. Node labels are arbitrary tokens,
//! numbered densely in order of first appearance.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::diffusion::SimulationResult;
use crate::error::{Error, Result};
use crate::graph::{CsrGraph, EdgeList};
use crate::scalar::Weight;
use crate::NodeId;

/// Bijection between external labels and dense internal ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IdMap {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
}

impl IdMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Labels `"0"..."n-1"` mapped to themselves.
    pub fn identity(n: usize) -> Self {
        let mut map = Self::new();
        for v in 0..n {
            map.intern(&v.to_string());
        }
        map
    }

    pub fn intern(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.labels.len() as NodeId;
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        id
    }

    pub fn id(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    pub fn resolve(&self, label: &str) -> Result<NodeId> {
        self.id(label).ok_or_else(|| Error::UnknownLabel(label.to_owned()))
    }

    pub fn label(&self, id: NodeId) -> &str {
        &self.labels[id as usize]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Parses a SNAP-style edge list.
pub fn read_edge_list<W: Weight, R: BufRead>(
    reader: R,
    directed: bool,
    weighted: bool,
) -> Result<(EdgeList<W>, IdMap)> {
    let mut ids = IdMap::new();
    let mut edges = EdgeList::new(directed);
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let expected = if weighted { 3 } else { 2 };
        if tokens.len() != expected {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected {expected} fields, found {}", tokens.len()),
            });
        }
        let weight = if weighted {
            let w: f64 = tokens[2].parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("bad weight {:?}", tokens[2]),
            })?;
            if !(0.0..=1.0).contains(&w) {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("weight {w} is outside [0, 1]"),
                });
            }
            Some(W::from_f64_lossy(w))
        } else {
            None
        };
        let u = ids.intern(tokens[0]);
        let v = ids.intern(tokens[1]);
        edges.push(u as u64, v as u64, weight);
    }
    edges.node_count = Some(ids.len());
    Ok((edges, ids))
}

/// Sort key putting numeric labels in numeric order ahead of other labels.
fn label_key(label: &str) -> (u8, u64, &str) {
    match label.parse::<u64>() {
        Ok(n) => (0, n, ""),
        Err(_) => (1, 0, label),
    }
}

/// Writes every arc as `u v w`, sorted by external label.
///
/// The output does not depend on the internal numbering, so reading it back
/// (directed, weighted) and dumping again reproduces it byte for byte.
pub fn write_arcs<W: Weight, Wr: Write>(
    graph: &CsrGraph<W>,
    ids: &IdMap,
    mut out: Wr,
) -> Result<()> {
    let mut arcs: Vec<(NodeId, NodeId, W)> = graph.arcs().collect();
    arcs.sort_by(|a, b| {
        (label_key(ids.label(a.0)), label_key(ids.label(a.1)))
            .cmp(&(label_key(ids.label(b.0)), label_key(ids.label(b.1))))
    });
    writeln!(
        out,
        "# directed weighted arcs: {} nodes, {} arcs",
        graph.node_count(),
        graph.arc_count()
    )?;
    for (u, v, w) in arcs {
        writeln!(out, "{} {} {}", ids.label(u), ids.label(v), w)?;
    }
    Ok(())
}

/// Writes the raw edges of an edge list, one per line, labels as given.
pub fn write_edge_list<W: Weight, Wr: Write>(edges: &EdgeList<W>, mut out: Wr) -> Result<()> {
    writeln!(
        out,
        "# {} edges: {}",
        if edges.directed { "directed" } else { "undirected" },
        edges.len()
    )?;
    for &(u, v, w) in &edges.edges {
        match w {
            Some(w) => writeln!(out, "{u} {v} {w}")?,
            None => writeln!(out, "{u} {v}")?,
        }
    }
    Ok(())
}

/// Per-node activation counts over a batch of trials.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeatmapData {
    pub counts: Vec<u64>,
    pub trials: usize,
    pub seeds: Vec<NodeId>,
}

impl HeatmapData {
    pub fn new(node_count: usize, seeds: &[NodeId]) -> Self {
        HeatmapData {
            counts: vec![0; node_count],
            trials: 0,
            seeds: seeds.to_vec(),
        }
    }

    pub fn record(&mut self, result: &SimulationResult) {
        for &v in &result.activated {
            self.counts[v as usize] += 1;
        }
        self.trials += 1;
    }

    pub fn frequency(&self, v: NodeId) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.counts[v as usize] as f64 / self.trials as f64
        }
    }

    /// CSV with header `external_id,activation_count,frequency`, one row per node.
    pub fn write_csv<Wr: Write>(&self, ids: &IdMap, mut out: Wr) -> Result<()> {
        writeln!(out, "external_id,activation_count,frequency")?;
        for (v, &c) in self.counts.iter().enumerate() {
            writeln!(out, "{},{},{}", ids.label(v as NodeId), c, self.frequency(v as NodeId))?;
        }
        Ok(())
    }
}

/// Heatmap over a batch of results from one graph and seed set.
pub fn export_heatmap(results: &[SimulationResult], node_count: usize, seeds: &[NodeId]) -> HeatmapData {
    let mut heat = HeatmapData::new(node_count, seeds);
    for r in results {
        heat.record(r);
    }
    heat
}

/// Mean cumulative activated count per step over a batch of trials. Runs that
/// stop early contribute their final count to every later step.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub mean_cumulative: Vec<f64>,
    pub trials: usize,
}

/// Streaming builder for [`TimeSeries`].
#[derive(Clone, Debug, Default)]
pub struct TimeSeriesBuilder {
    sums: Vec<u64>,
    // ended[len] = sum of final counts of runs with exactly `len` steps.
    ended: Vec<u64>,
    trials: usize,
}

impl TimeSeriesBuilder {
    pub fn record(&mut self, result: &SimulationResult) {
        let cumulative = result.cumulative();
        if self.sums.len() < cumulative.len() {
            self.sums.resize(cumulative.len(), 0);
        }
        for (s, &c) in self.sums.iter_mut().zip(&cumulative) {
            *s += c as u64;
        }
        let len = cumulative.len();
        if self.ended.len() <= len {
            self.ended.resize(len + 1, 0);
        }
        self.ended[len] += cumulative.last().copied().unwrap_or(0) as u64;
        self.trials += 1;
    }

    pub fn finish(&self) -> TimeSeries {
        let mut carried = 0u64;
        let mean_cumulative = self
            .sums
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                carried += self.ended.get(i).copied().unwrap_or(0);
                (s + carried) as f64 / self.trials as f64
            })
            .collect();
        TimeSeries {
            mean_cumulative,
            trials: self.trials,
        }
    }
}

pub fn export_timeseries(results: &[SimulationResult]) -> Result<TimeSeries> {
    if results.is_empty() {
        return Err(Error::Parameter("time series needs at least one trial".into()));
    }
    let mut b = TimeSeriesBuilder::default();
    for r in results {
        b.record(r);
    }
    Ok(b.finish())
}

impl TimeSeries {
    pub fn final_value(&self) -> f64 {
        self.mean_cumulative.last().copied().unwrap_or(0.0)
    }

    /// Value at `iteration`, carrying the final value past the end.
    pub fn at(&self, iteration: usize) -> f64 {
        self.mean_cumulative
            .get(iteration)
            .copied()
            .unwrap_or_else(|| self.final_value())
    }

    /// CSV with header `iteration,mean_cumulative_activated`.
    pub fn write_csv<Wr: Write>(&self, mut out: Wr) -> Result<()> {
        writeln!(out, "iteration,mean_cumulative_activated")?;
        for (i, m) in self.mean_cumulative.iter().enumerate() {
            writeln!(out, "{i},{m}")?;
        }
        Ok(())
    }
}

/// Several named series side by side, padded to the longest.
pub fn write_comparison_csv<Wr: Write>(series: &[(&str, &TimeSeries)], mut out: Wr) -> Result<()> {
    write!(out, "iteration")?;
    for (name, _) in series {
        write!(out, ",{name}")?;
    }
    writeln!(out)?;
    let len = series.iter().map(|(_, s)| s.mean_cumulative.len()).max().unwrap_or(0);
    for i in 0..len {
        write!(out, "{i}")?;
        for (_, s) in series {
            write!(out, ",{}", s.at(i))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// JSON documents carrying a `schema` version string.
pub trait Report: Serialize + DeserializeOwned {
    const SCHEMA: &'static str;

    fn schema(&self) -> &str;
}

pub fn write_report<R: Report, Wr: Write>(report: &R, mut out: Wr) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, report)?;
    writeln!(out)?;
    Ok(())
}

pub fn read_report<R: Report, Rd: std::io::Read>(reader: Rd) -> Result<R> {
    let report: R = serde_json::from_reader(reader)?;
    if report.schema() != R::SCHEMA {
        return Err(Error::Parameter(format!(
            "expected schema {}, found {}",
            R::SCHEMA,
            report.schema()
        )));
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub nodes: usize,
    pub arcs: usize,
    pub weight_model: String,
}

/// Influence estimate for one seed set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaReport {
    pub schema: String,
    pub model: String,
    pub engine: String,
    pub graph: GraphSummary,
    pub trials: usize,
    pub global_seed: u64,
    pub seeds: Vec<String>,
    pub sigma: f64,
    pub mean_iterations: f64,
    pub mean_edges_examined: f64,
}

impl Report for SigmaReport {
    const SCHEMA: &'static str = "netdiff.sigma.v1";

    fn schema(&self) -> &str {
        &self.schema
    }
}

/// Final mean activation of a baseline seed set, for comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub method: String,
    pub seeds: Vec<String>,
    pub final_mean_activated: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub schema: String,
    pub method: String,
    pub model: String,
    pub graph: GraphSummary,
    pub budget: usize,
    pub trials: usize,
    pub global_seed: u64,
    pub seeds: Vec<String>,
    /// Empty for methods that do not estimate gains (degree, random).
    pub marginal_gains: Vec<f64>,
    pub evaluations: Vec<usize>,
    pub total_evaluations: usize,
    pub sigma: f64,
    pub elapsed_secs: f64,
    pub comparison: Vec<MethodOutcome>,
}

impl Report for SelectionReport {
    const SCHEMA: &'static str = "netdiff.selection.v1";

    fn schema(&self) -> &str {
        &self.schema
    }
}
