//! Monte-Carlo influence estimation and seed selection.
//!
//! Every σ̂ evaluation under one [`EstimatorConfig`] replays the same trial
//! plans (common random numbers). Per-trial IC outcomes are reachability in a
//! fixed live-edge graph, so σ̂ is itself monotone and submodular, which is
//! what makes lazy (CELF) evaluation return exactly the greedy answer.
//! Under LT with per-trial fixed thresholds σ̂ is monotone but not always
//! submodular, so there CELF is the usual lazy heuristic and may differ from
//! greedy.
//! Totals are accumulated as integers, so comparisons between candidates are
//! exact and independent of how trials are scheduled across workers.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::ops::Deref;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diffusion::{deviate, Engine, ModelSpec, Simulator, TrialPlan};
use crate::error::{Error, Result};
use crate::graph::CsrGraph;
use crate::scalar::Weight;
use crate::NodeId;

/// Trial index reserved for random seed selection draws.
const SELECTION_STREAM: u64 = u64::MAX - 1;

pub const DEFAULT_TRIALS: usize = 1000;

/// Ordered set of distinct seed nodes; order is selection order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SeedSet(Vec<NodeId>);

impl SeedSet {
    pub fn new(nodes: Vec<NodeId>, node_count: usize) -> Result<Self> {
        let mut seen = vec![false; node_count];
        for &v in &nodes {
            let slot = seen.get_mut(v as usize).ok_or(Error::InvalidNode {
                node: v as u64,
                node_count,
            })?;
            if std::mem::replace(slot, true) {
                return Err(Error::DuplicateSeed(v));
            }
        }
        Ok(SeedSet(nodes))
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<NodeId> {
        self.0
    }
}

impl Deref for SeedSet {
    type Target = [NodeId];

    fn deref(&self) -> &[NodeId] {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    /// Monte-Carlo trials R per σ̂ evaluation.
    pub trials: usize,
    pub global_seed: u64,
    /// Worker threads for fanning out trials; 1 runs inline.
    #[serde(default = "one")]
    pub workers: usize,
}

fn one() -> usize {
    1
}

impl EstimatorConfig {
    pub fn new(trials: usize, global_seed: u64) -> Self {
        EstimatorConfig {
            trials,
            global_seed,
            workers: 1,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig::new(DEFAULT_TRIALS, 0)
    }
}

/// Outcome of a seed-selection run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionTrace {
    pub seeds: SeedSet,
    /// σ̂(S ∪ {v}) − σ̂(S) at the moment each seed was picked.
    pub marginal_gains: Vec<f64>,
    /// σ̂ evaluations spent on each pick.
    pub evaluations: Vec<usize>,
    /// σ̂ of the final seed set.
    pub sigma: f64,
}

impl SelectionTrace {
    pub fn total_evaluations(&self) -> usize {
        self.evaluations.iter().sum()
    }
}

/// Sums activated counts over the configured trials.
pub struct Estimator<'g, W = f64> {
    spec: ModelSpec<'g, W>,
    cfg: EstimatorConfig,
    sim: Simulator<'g, W>,
    pool: Option<rayon::ThreadPool>,
    scratch: Vec<NodeId>,
}

impl<'g, W: Weight> Estimator<'g, W> {
    pub fn new(spec: &ModelSpec<'g, W>, cfg: EstimatorConfig) -> Result<Self> {
        if cfg.trials == 0 {
            return Err(Error::Parameter("trials must be at least 1".into()));
        }
        let pool = if cfg.workers > 1 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(cfg.workers)
                    .build()
                    .map_err(|e| Error::Parameter(e.to_string()))?,
            )
        } else {
            None
        };
        Ok(Estimator {
            spec: *spec,
            cfg,
            sim: Simulator::for_spec(spec),
            pool,
            scratch: Vec::new(),
        })
    }

    pub fn config(&self) -> EstimatorConfig {
        self.cfg
    }

    /// Σ over trials of |activated|.
    pub fn total(&mut self, seeds: &[NodeId]) -> Result<u64> {
        let global_seed = self.cfg.global_seed;
        let plan = move |t: usize| TrialPlan::new(global_seed, t as u64);
        match &self.pool {
            None => {
                let mut sum = 0u64;
                for t in 0..self.cfg.trials {
                    sum += self.sim.run(seeds, plan(t), Engine::Frontier)?.activated_count() as u64;
                }
                Ok(sum)
            }
            Some(pool) => {
                let spec = self.spec;
                pool.install(|| {
                    (0..self.cfg.trials)
                        .into_par_iter()
                        .map_init(
                            || Simulator::for_spec(&spec),
                            |sim, t| {
                                sim.run(seeds, plan(t), Engine::Frontier)
                                    .map(|r| r.activated_count() as u64)
                            },
                        )
                        .try_reduce(|| 0, |a, b| Ok(a + b))
                })
            }
        }
    }

    pub fn sigma(&mut self, seeds: &[NodeId]) -> Result<f64> {
        Ok(self.total(seeds)? as f64 / self.cfg.trials as f64)
    }

    /// Total for `base ∪ {extra}`.
    fn total_with(&mut self, base: &[NodeId], extra: NodeId) -> Result<u64> {
        let mut seeds = std::mem::take(&mut self.scratch);
        seeds.clear();
        seeds.extend_from_slice(base);
        seeds.push(extra);
        let total = self.total(&seeds);
        self.scratch = seeds;
        total
    }

    fn gain(&self, total: u64, base: u64) -> f64 {
        (total as i64 - base as i64) as f64 / self.cfg.trials as f64
    }

    fn per_trial(&self, total: u64) -> f64 {
        total as f64 / self.cfg.trials as f64
    }
}

/// Monte-Carlo estimate of the expected number of activated nodes (seeds included).
pub fn estimate_sigma<W: Weight>(
    spec: &ModelSpec<'_, W>,
    seeds: &[NodeId],
    cfg: EstimatorConfig,
) -> Result<f64> {
    SeedSet::new(seeds.to_vec(), spec.graph().node_count())?;
    Estimator::new(spec, cfg)?.sigma(seeds)
}

fn check_budget(k: usize, n: usize, allow_zero: bool) -> Result<()> {
    if k > n || (k == 0 && !allow_zero) {
        Err(Error::Budget { k, node_count: n })
    } else {
        Ok(())
    }
}

/// Plain greedy: every round evaluates every remaining candidate.
pub fn select_greedy<W: Weight>(
    spec: &ModelSpec<'_, W>,
    k: usize,
    cfg: EstimatorConfig,
) -> Result<SelectionTrace> {
    let n = spec.graph().node_count();
    check_budget(k, n, false)?;
    let mut est = Estimator::new(spec, cfg)?;
    let mut chosen: Vec<NodeId> = Vec::with_capacity(k);
    let mut in_set = vec![false; n];
    let mut base = 0u64;
    let mut gains = Vec::with_capacity(k);
    let mut evaluations = Vec::with_capacity(k);

    for _ in 0..k {
        let mut best: Option<(u64, NodeId)> = None;
        let mut evals = 0;
        for v in (0..n as NodeId).filter(|&v| !in_set[v as usize]) {
            let total = est.total_with(&chosen, v)?;
            evals += 1;
            // Strict comparison keeps the smallest id among ties.
            if best.is_none_or(|(t, _)| total > t) {
                best = Some((total, v));
            }
        }
        let (total, v) = best.expect("k <= n leaves a candidate");
        gains.push(est.gain(total, base));
        evaluations.push(evals);
        chosen.push(v);
        in_set[v as usize] = true;
        base = total;
    }

    Ok(SelectionTrace {
        seeds: SeedSet(chosen),
        marginal_gains: gains,
        evaluations,
        sigma: est.per_trial(base),
    })
}

#[derive(Debug, PartialEq, Eq)]
struct Candidate {
    gain: i64,
    node: NodeId,
    /// Pick index at which `gain` was computed.
    fresh_at: usize,
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.gain, Reverse(self.node)).cmp(&(other.gain, Reverse(other.node)))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// CELF lazy greedy. Cached gains are upper bounds on current gains, so the
/// top of the queue is accepted as soon as its gain is up to date.
pub fn select_celf<W: Weight>(
    spec: &ModelSpec<'_, W>,
    k: usize,
    cfg: EstimatorConfig,
) -> Result<SelectionTrace> {
    let n = spec.graph().node_count();
    check_budget(k, n, false)?;
    let mut est = Estimator::new(spec, cfg)?;
    let mut heap = BinaryHeap::with_capacity(n);
    for v in 0..n as NodeId {
        let total = est.total(&[v])?;
        heap.push(Candidate {
            gain: total as i64,
            node: v,
            fresh_at: 0,
        });
    }

    let mut chosen: Vec<NodeId> = Vec::with_capacity(k);
    let mut base = 0u64;
    let mut gains = Vec::with_capacity(k);
    let mut evaluations = Vec::with_capacity(k);
    let mut evals = n;

    while chosen.len() < k {
        let pick = chosen.len();
        let top = heap.pop().expect("k <= n leaves a candidate");
        if top.fresh_at == pick {
            let total = (base as i64 + top.gain) as u64;
            gains.push(est.gain(total, base));
            evaluations.push(evals);
            evals = 0;
            chosen.push(top.node);
            base = total;
        } else {
            let total = est.total_with(&chosen, top.node)?;
            evals += 1;
            heap.push(Candidate {
                gain: total as i64 - base as i64,
                node: top.node,
                fresh_at: pick,
            });
        }
    }

    Ok(SelectionTrace {
        seeds: SeedSet(chosen),
        marginal_gains: gains,
        evaluations,
        sigma: est.per_trial(base),
    })
}

/// The `k` nodes of largest out-degree, ties to the smaller id.
pub fn select_degree<W: Weight>(graph: &CsrGraph<W>, k: usize) -> Result<SeedSet> {
    let n = graph.node_count();
    check_budget(k, n, true)?;
    let mut nodes: Vec<NodeId> = (0..n as NodeId).collect();
    nodes.sort_by_key(|&v| (Reverse(graph.out_degree(v)), v));
    nodes.truncate(k);
    Ok(SeedSet(nodes))
}

/// `k` distinct nodes uniformly without replacement, determined by `seed`.
pub fn select_random<W: Weight>(graph: &CsrGraph<W>, k: usize, seed: u64) -> Result<SeedSet> {
    let n = graph.node_count();
    check_budget(k, n, true)?;
    let mut nodes: Vec<NodeId> = (0..n as NodeId).collect();
    for i in 0..k {
        let u = deviate(seed, SELECTION_STREAM, i as u64);
        let j = i + ((u * (n - i) as f64) as usize).min(n - i - 1);
        nodes.swap(i, j);
    }
    nodes.truncate(k);
    Ok(SeedSet(nodes))
}
