//! Independent cascade and linear threshold simulation.
//!
//! Two engines share one randomness contract:
//!
//! * [`Engine::Frontier`] processes only the out-arcs of nodes activated in the
//!   previous step. Any non-seed node activated at step `t` has an in-neighbor
//!   activated at `t - 1`, so nothing else can change.
//! * [`Engine::Naive`] scans every node in every step and pulls from its
//!   in-arcs. It is the reference the frontier engine is checked against and
//!   the baseline in benchmarks.
//!
//! IC coins are keyed by arc slot and LT thresholds by node, both through
//! [`deviate`], so a trial's outcome depends only on its [`TrialPlan`] and not
//! on the order in which either engine happens to visit arcs.

mod engine;
mod oracle;
mod rng;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::CsrGraph;
use crate::scalar::Weight;
use crate::NodeId;

pub use engine::Simulator;
pub use oracle::live_edge_reachability;
pub use rng::{deviate, hash3};

/// Entity-id offset for LT thresholds, keeping them disjoint from arc slots.
pub(crate) const THRESHOLD_STREAM: u64 = 1 << 63;

/// Deterministic handle for all randomness of one simulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TrialPlan {
    pub global_seed: u64,
    pub trial_index: u64,
}

impl TrialPlan {
    pub fn new(global_seed: u64, trial_index: u64) -> Self {
        TrialPlan {
            global_seed,
            trial_index,
        }
    }

    /// Whether the IC coin on arc `slot` succeeds against probability `p`.
    #[inline]
    pub fn coin(&self, slot: usize, p: f64) -> bool {
        deviate(self.global_seed, self.trial_index, slot as u64) < p
    }

    /// LT threshold of `node`, uniform on (0, 1].
    #[inline]
    pub fn threshold(&self, node: NodeId) -> f64 {
        1.0 - deviate(
            self.global_seed,
            self.trial_index,
            THRESHOLD_STREAM ^ node as u64,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Ic,
    Lt,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Ic => "ic",
            ModelKind::Lt => "lt",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Frontier,
    Naive,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Frontier => "frontier",
            Engine::Naive => "naive",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A diffusion model bound to a graph.
#[derive(Clone, Copy, Debug)]
pub struct ModelSpec<'g, W = f64> {
    kind: ModelKind,
    graph: &'g CsrGraph<W>,
}

impl<'g, W: Weight> ModelSpec<'g, W> {
    pub fn new(kind: ModelKind, graph: &'g CsrGraph<W>) -> Result<Self> {
        if kind == ModelKind::Lt {
            graph.check_threshold_constraint()?;
        }
        Ok(ModelSpec { kind, graph })
    }

    pub fn ic(graph: &'g CsrGraph<W>) -> Self {
        ModelSpec {
            kind: ModelKind::Ic,
            graph,
        }
    }

    pub fn lt(graph: &'g CsrGraph<W>) -> Result<Self> {
        Self::new(ModelKind::Lt, graph)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn graph(&self) -> &'g CsrGraph<W> {
        self.graph
    }

    pub(crate) fn expect(&self, kind: ModelKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::ModelMismatch {
                expected: kind.name(),
                actual: self.kind.name(),
            })
        }
    }
}

/// Outcome of a single trial.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationResult {
    /// Activated nodes grouped by activation step, ascending within a step.
    pub activated: Vec<NodeId>,
    /// Entry `t` counts nodes first activated at step `t`; entry 0 is the seed count.
    pub newly_active_per_iter: Vec<usize>,
    pub iterations: usize,
    /// Work counter. Frontier: arcs inspected. Naive: node scans plus in-arcs inspected.
    pub edges_examined: u64,
}

impl SimulationResult {
    pub fn activated_count(&self) -> usize {
        self.activated.len()
    }

    /// `(node, step)` for every activated node.
    pub fn activation_steps(&self) -> impl Iterator<Item = (NodeId, usize)> + '_ {
        self.newly_active_per_iter
            .iter()
            .enumerate()
            .flat_map(|(t, &c)| std::iter::repeat_n(t, c))
            .zip(self.activated.iter().copied())
            .map(|(t, v)| (v, t))
    }

    pub fn activated_sorted(&self) -> Vec<NodeId> {
        let mut v = self.activated.clone();
        v.sort_unstable();
        v
    }

    /// Cumulative activated count after each step.
    pub fn cumulative(&self) -> Vec<usize> {
        self.newly_active_per_iter
            .iter()
            .scan(0, |acc, &c| {
                *acc += c;
                Some(*acc)
            })
            .collect()
    }
}

/// Runs one IC trial.
pub fn simulate_ic<W: Weight>(
    spec: &ModelSpec<'_, W>,
    seeds: &[NodeId],
    plan: TrialPlan,
    engine: Engine,
) -> Result<SimulationResult> {
    spec.expect(ModelKind::Ic)?;
    Simulator::new(spec.graph(), ModelKind::Ic).run(seeds, plan, engine)
}

/// Runs one LT trial.
pub fn simulate_lt<W: Weight>(
    spec: &ModelSpec<'_, W>,
    seeds: &[NodeId],
    plan: TrialPlan,
    engine: Engine,
) -> Result<SimulationResult> {
    spec.expect(ModelKind::Lt)?;
    Simulator::new(spec.graph(), ModelKind::Lt).run(seeds, plan, engine)
}

/// Runs one trial of whichever model `spec` names.
pub fn simulate<W: Weight>(
    spec: &ModelSpec<'_, W>,
    seeds: &[NodeId],
    plan: TrialPlan,
    engine: Engine,
) -> Result<SimulationResult> {
    Simulator::for_spec(spec).run(seeds, plan, engine)
}
