//! Comparative timing of simulation engines over a fixed batch of trials.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::diffusion::{Engine, ModelSpec, Simulator, TrialPlan};
use crate::error::{Error, Result};
use crate::io::{GraphSummary, Report};
use crate::scalar::Weight;
use crate::NodeId;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineRun {
    pub engine: Engine,
    pub wall_secs: f64,
    /// Simulations per second, `trials / wall_secs`.
    pub sims_per_sec: f64,
    pub total_edges_examined: u64,
    pub mean_activated: f64,
    /// Runtime relative to the fastest engine, rounded; the fastest is 1.
    pub normalized_runtime: u64,
    /// |activated| of every trial, in trial order.
    pub activated_sizes: Vec<usize>,
    pub edges_examined: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub schema: String,
    pub model: String,
    pub graph: GraphSummary,
    pub seed_count: usize,
    pub trials: usize,
    pub global_seed: u64,
    pub engines: Vec<EngineRun>,
}

impl Report for BenchmarkReport {
    const SCHEMA: &'static str = "netdiff.benchmark.v1";

    fn schema(&self) -> &str {
        &self.schema
    }
}

impl BenchmarkReport {
    pub fn run(&self, engine: Engine) -> Option<&EngineRun> {
        self.engines.iter().find(|r| r.engine == engine)
    }

    /// Human-readable table in the style of `simple_benchmark` output.
    pub fn write_table<Wr: Write>(&self, mut out: Wr) -> Result<()> {
        writeln!(
            out,
            "{} diffusion: {} nodes, {} arcs, weights {}, {} seeds, {} trials",
            self.model.to_uppercase(),
            self.graph.nodes,
            self.graph.arcs,
            self.graph.weight_model,
            self.seed_count,
            self.trials
        )?;
        writeln!(
            out,
            "{:<10} {:>12} {:>14} {:>18} {:>14} {:>9}",
            "engine", "wall (s)", "it/s", "edges examined", "mean active", "relative"
        )?;
        for r in &self.engines {
            writeln!(
                out,
                "{:<10} {:>12.4} {:>14.1} {:>18} {:>14.3} {:>9}",
                r.engine.name(),
                r.wall_secs,
                r.sims_per_sec,
                r.total_edges_examined,
                r.mean_activated,
                r.normalized_runtime
            )?;
        }
        Ok(())
    }
}

/// Runtimes divided by the fastest and rounded to the nearest integer.
pub fn normalized_runtimes(walls: &[f64]) -> Vec<u64> {
    let fastest = walls.iter().copied().fold(f64::INFINITY, f64::min);
    walls
        .iter()
        .map(|&w| ((w / fastest).round() as u64).max(1))
        .collect()
}

/// Times every engine over the same `trials` plans, one thread, after one
/// untimed warmup trial each.
pub fn run_benchmark<W: Weight>(
    spec: &ModelSpec<'_, W>,
    seeds: &[NodeId],
    engines: &[Engine],
    trials: usize,
    global_seed: u64,
    weight_model: &str,
) -> Result<BenchmarkReport> {
    if trials == 0 || engines.is_empty() {
        return Err(Error::Parameter(
            "benchmark needs at least one trial and one engine".into(),
        ));
    }
    let mut runs = Vec::with_capacity(engines.len());
    for &engine in engines {
        let mut sim = Simulator::for_spec(spec);
        sim.run(seeds, TrialPlan::new(global_seed, 0), engine)?;

        let mut activated_sizes = Vec::with_capacity(trials);
        let mut edges_examined = Vec::with_capacity(trials);
        let start = Instant::now();
        for t in 0..trials {
            let r = sim.run(seeds, TrialPlan::new(global_seed, t as u64), engine)?;
            activated_sizes.push(r.activated_count());
            edges_examined.push(r.edges_examined);
        }
        let wall_secs = start.elapsed().as_secs_f64().max(1e-9);

        runs.push(EngineRun {
            engine,
            wall_secs,
            sims_per_sec: trials as f64 / wall_secs,
            total_edges_examined: edges_examined.iter().sum(),
            mean_activated: activated_sizes.iter().sum::<usize>() as f64 / trials as f64,
            normalized_runtime: 1,
            activated_sizes,
            edges_examined,
        });
    }
    let walls: Vec<f64> = runs.iter().map(|r| r.wall_secs).collect();
    for (r, n) in runs.iter_mut().zip(normalized_runtimes(&walls)) {
        r.normalized_runtime = n;
    }

    let g = spec.graph();
    Ok(BenchmarkReport {
        schema: BenchmarkReport::SCHEMA.into(),
        model: spec.kind().name().into(),
        graph: GraphSummary {
            nodes: g.node_count(),
            arcs: g.arc_count(),
            weight_model: weight_model.into(),
        },
        seed_count: seeds.len(),
        trials,
        global_seed,
        engines: runs,
    })
}
