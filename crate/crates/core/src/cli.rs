//! `netdiff` command-line interface.
//!
//! Exit codes: 0 success, 2 usage error, 3 validation error, 4 I/O error.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::bench::run_benchmark;
use crate::diffusion::{Engine, ModelKind, ModelSpec, SimulationResult, Simulator, TrialPlan};
use crate::error::Error;
use crate::generators::{generate, GenKind, GenSpec};
use crate::graph::{build_csr, WeightModel};
use crate::influence::{
    select_celf, select_degree, select_greedy, select_random, EstimatorConfig, SeedSet, DEFAULT_TRIALS,
};
use crate::io::{
    read_edge_list, write_arcs, write_comparison_csv, write_edge_list, write_report, GraphSummary,
    HeatmapData, IdMap, MethodOutcome, Report, SelectionReport, SigmaReport, TimeSeries,
    TimeSeriesBuilder,
};
use crate::{Graph, NodeId};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_IO: i32 = 4;

const CHUNK: usize = 4096;

#[derive(Debug, Parser)]
#[command(name = "netdiff", version, about = "Independent cascade and linear threshold diffusion on large graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic undirected graph as an edge list.
    Generate(GenerateArgs),
    /// Assign edge weights and write the weighted directed arc list.
    Weights(WeightsArgs),
    /// Run Monte-Carlo simulations for a seed set.
    Simulate(SimulateArgs),
    /// Select seeds for influence maximization and compare with baselines.
    Influence(InfluenceArgs),
    /// Time simulation engines over a batch of trials.
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Generator to use.
    #[arg(long = "gen", value_enum)]
    pub kind: Option<GenKind>,
    /// Node count.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Edge probability (er) or rewiring probability (ws).
    #[arg(long, default_value_t = 0.01)]
    pub p: f64,
    /// Ring neighbours (ws) or degree (rr).
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    /// Generator seed.
    #[arg(long, default_value_t = 0)]
    pub gen_seed: u64,
}

impl GenArgs {
    fn spec(&self, kind: GenKind) -> GenSpec {
        GenSpec {
            kind,
            n: self.n,
            p: self.p,
            k: self.k,
            seed: self.gen_seed,
        }
    }
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Edge-list file (`u v` or `u v w` per line, `#` comments).
    #[arg(long, short = 'i', conflicts_with = "kind")]
    pub input: Option<PathBuf>,
    /// Treat input edges as directed arcs.
    #[arg(long)]
    pub directed: bool,
    /// Input lines carry a third weight column.
    #[arg(long)]
    pub weighted: bool,
    #[command(flatten)]
    pub gen: GenArgs,
    /// Edge-weight model.
    #[arg(long = "weights", value_enum, default_value_t = WeightModel::Wc)]
    pub weight_model: WeightModel,
    /// Seed for tv/ur weight draws (defaults to --seed).
    #[arg(long)]
    pub weight_seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Diffusion model.
    #[arg(long, value_enum, default_value_t = ModelKind::Ic)]
    pub model: ModelKind,
    /// For lt: rescale incoming weights of nodes whose sum exceeds 1.
    #[arg(long)]
    pub normalize: bool,
    /// Global seed for all randomness.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Print a JSON report instead of the human summary.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub gen: GenArgs,
    /// Output path (stdout if omitted).
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WeightsArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// For lt use: rescale incoming weights of nodes whose sum exceeds 1.
    #[arg(long)]
    pub normalize: bool,
    /// Seed for tv/ur weight draws when --weight-seed is not given.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output path (stdout if omitted).
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SeedArgs {
    /// Comma-separated seed node labels.
    #[arg(long, value_delimiter = ',', conflicts_with = "num_seeds")]
    pub seeds: Vec<String>,
    /// Draw this many seeds uniformly at random (from --seed).
    #[arg(long)]
    pub num_seeds: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub seed_args: SeedArgs,
    /// Simulation engine.
    #[arg(long, value_enum, default_value_t = Engine::Frontier)]
    pub engine: Engine,
    /// Number of independent trials.
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
    /// Worker threads for trials.
    #[arg(long, default_value_t = 1)]
    pub parallel: usize,
    /// Write per-node activation counts as CSV.
    #[arg(long)]
    pub export_heatmap: Option<PathBuf>,
    /// Write mean cumulative activations per iteration as CSV.
    #[arg(long)]
    pub export_timeseries: Option<PathBuf>,
    /// Write the JSON report to a file.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Celf,
    Greedy,
    Degree,
    Random,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Celf => "celf",
            Method::Greedy => "greedy",
            Method::Degree => "degree",
            Method::Random => "random",
        }
    }
}

#[derive(Debug, Args)]
pub struct InfluenceArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Seed-selection method.
    #[arg(long, value_enum, default_value_t = Method::Celf)]
    pub method: Method,
    /// Number of seeds k.
    #[arg(long, short = 'k', default_value_t = 10)]
    pub budget: usize,
    /// Monte-Carlo trials per influence estimate.
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
    /// Worker threads for trials.
    #[arg(long, default_value_t = 1)]
    pub parallel: usize,
    /// Write selected seed labels, one per line.
    #[arg(long)]
    pub seeds_out: Option<PathBuf>,
    /// Write mean activation over time for the method and the degree/random baselines.
    #[arg(long)]
    pub export_timeseries: Option<PathBuf>,
    /// Write the JSON report to a file.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub seed_args: SeedArgs,
    /// Engines to time, comma-separated.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Engine::Frontier, Engine::Naive])]
    pub engines: Vec<Engine>,
    /// Simulations per engine.
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
    /// Write the JSON report to a file.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Core(Error::Io(e))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name) and runs the command, writing
/// normal output to `out`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Core(e)) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_IO
            }
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Generate(a) => cmd_generate(a, out),
        Command::Weights(a) => cmd_weights(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Influence(a) => cmd_influence(a, out),
        Command::Benchmark(a) => cmd_benchmark(a, out),
    }
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Core(Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))))
}

fn with_output(path: Option<&Path>, out: &mut dyn Write, f: impl FnOnce(&mut dyn Write) -> crate::Result<()>) -> CliResult<()> {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            f(&mut w)?;
            w.flush()?;
        }
        None => f(out)?,
    }
    Ok(())
}

struct LoadedGraph {
    graph: Graph,
    ids: IdMap,
    weight_model: WeightModel,
}

fn load_graph(args: &GraphArgs, default_seed: u64) -> CliResult<LoadedGraph> {
    if args.weight_model == WeightModel::File && !(args.weighted && args.input.is_some()) {
        return Err(CliError::Usage("--weights file requires --input with --weighted".into()));
    }
    let (edges, ids) = match (&args.input, args.gen.kind) {
        (Some(path), _) => {
            let file = File::open(path).map_err(|e| {
                CliError::Core(Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
            })?;
            read_edge_list(BufReader::new(file), args.directed, args.weighted)?
        }
        (None, Some(kind)) => {
            let spec = args.gen.spec(kind);
            (generate(&spec)?, IdMap::identity(spec.n))
        }
        (None, None) => return Err(CliError::Usage("one of --input or --gen is required".into())),
    };
    let (graph, _) = build_csr(&edges)?;
    let graph = graph.with_weight_model(args.weight_model, args.weight_seed.unwrap_or(default_seed));
    Ok(LoadedGraph {
        graph,
        ids,
        weight_model: args.weight_model,
    })
}

fn prepare_model(mut loaded: LoadedGraph, model: &ModelArgs) -> LoadedGraph {
    if model.model == ModelKind::Lt && model.normalize {
        loaded.graph = loaded.graph.normalize_incoming();
    }
    loaded
}

fn summary(loaded: &LoadedGraph) -> GraphSummary {
    GraphSummary {
        nodes: loaded.graph.node_count(),
        arcs: loaded.graph.arc_count(),
        weight_model: loaded.weight_model.name().into(),
    }
}

fn resolve_seeds(args: &SeedArgs, loaded: &LoadedGraph, seed: u64) -> CliResult<SeedSet> {
    let n = loaded.graph.node_count();
    if !args.seeds.is_empty() {
        let nodes = args
            .seeds
            .iter()
            .map(|label| loaded.ids.resolve(label.trim()))
            .collect::<crate::Result<Vec<NodeId>>>()?;
        Ok(SeedSet::new(nodes, n)?)
    } else if let Some(k) = args.num_seeds {
        Ok(select_random(&loaded.graph, k, seed)?)
    } else {
        Err(CliError::Usage("one of --seeds or --num-seeds is required".into()))
    }
}

fn labels(ids: &IdMap, nodes: &[NodeId]) -> Vec<String> {
    nodes.iter().map(|&v| ids.label(v).to_owned()).collect()
}

fn emit<R: Report>(report: &R, path: Option<&Path>, json: bool, out: &mut dyn Write) -> CliResult<()> {
    if let Some(p) = path {
        let mut w = create(p)?;
        write_report(report, &mut w)?;
        w.flush()?;
    }
    if json {
        write_report(report, &mut *out)?;
    }
    Ok(())
}

/// Runs `trials` trials in chunks, feeding each result to `sink` in trial order.
fn for_each_trial(
    spec: &ModelSpec<'_, f64>,
    seeds: &[NodeId],
    engine: Engine,
    trials: usize,
    global_seed: u64,
    workers: usize,
    mut sink: impl FnMut(&SimulationResult),
) -> CliResult<()> {
    let pool = if workers > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| CliError::Usage(e.to_string()))?,
        )
    } else {
        None
    };
    let mut sim = Simulator::for_spec(spec);
    let mut start = 0;
    while start < trials {
        let end = (start + CHUNK).min(trials);
        match &pool {
            None => {
                for t in start..end {
                    sink(&sim.run(seeds, TrialPlan::new(global_seed, t as u64), engine)?);
                }
            }
            Some(pool) => {
                let batch: Vec<SimulationResult> = pool.install(|| {
                    (start..end)
                        .into_par_iter()
                        .map_init(
                            || Simulator::for_spec(spec),
                            |s, t| s.run(seeds, TrialPlan::new(global_seed, t as u64), engine),
                        )
                        .collect::<crate::Result<_>>()
                })?;
                batch.iter().for_each(&mut sink);
            }
        }
        start = end;
    }
    Ok(())
}

fn timeseries_for(
    spec: &ModelSpec<'_, f64>,
    seeds: &[NodeId],
    cfg: EstimatorConfig,
) -> CliResult<TimeSeries> {
    let mut b = TimeSeriesBuilder::default();
    for_each_trial(spec, seeds, Engine::Frontier, cfg.trials, cfg.global_seed, cfg.workers, |r| {
        b.record(r)
    })?;
    Ok(b.finish())
}

pub fn cmd_generate_to(spec: &GenSpec, out: &mut dyn Write) -> crate::Result<()> {
    let edges = generate::<f64>(spec)?;
    write_edge_list(&edges, out)
}

fn cmd_generate(a: GenerateArgs, out: &mut dyn Write) -> CliResult<()> {
    let kind = a
        .gen
        .kind
        .ok_or_else(|| CliError::Usage("--gen is required".into()))?;
    let spec = a.gen.spec(kind);
    with_output(a.out.as_deref(), out, |w| cmd_generate_to(&spec, w))
}

fn cmd_weights(a: WeightsArgs, out: &mut dyn Write) -> CliResult<()> {
    let mut loaded = load_graph(&a.graph, a.seed)?;
    if a.normalize {
        loaded.graph = loaded.graph.normalize_incoming();
    }
    with_output(a.out.as_deref(), out, |w| write_arcs(&loaded.graph, &loaded.ids, w))
}

fn cmd_simulate(a: SimulateArgs, out: &mut dyn Write) -> CliResult<()> {
    let loaded = prepare_model(load_graph(&a.graph, a.model.seed)?, &a.model);
    let spec = ModelSpec::new(a.model.model, &loaded.graph)?;
    let seeds = resolve_seeds(&a.seed_args, &loaded, a.model.seed)?;
    if a.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }

    let n = loaded.graph.node_count();
    let mut heat = HeatmapData::new(n, &seeds);
    let mut series = TimeSeriesBuilder::default();
    let (mut activated, mut iterations, mut examined) = (0u64, 0u64, 0u64);
    for_each_trial(&spec, &seeds, a.engine, a.trials, a.model.seed, a.parallel, |r| {
        activated += r.activated_count() as u64;
        iterations += r.iterations as u64;
        examined += r.edges_examined;
        heat.record(r);
        series.record(r);
    })?;

    if let Some(p) = &a.export_heatmap {
        let mut w = create(p)?;
        heat.write_csv(&loaded.ids, &mut w)?;
        w.flush()?;
    }
    if let Some(p) = &a.export_timeseries {
        let mut w = create(p)?;
        series.finish().write_csv(&mut w)?;
        w.flush()?;
    }

    let trials = a.trials as f64;
    let report = SigmaReport {
        schema: SigmaReport::SCHEMA.into(),
        model: a.model.model.name().into(),
        engine: a.engine.name().into(),
        graph: summary(&loaded),
        trials: a.trials,
        global_seed: a.model.seed,
        seeds: labels(&loaded.ids, &seeds),
        sigma: activated as f64 / trials,
        mean_iterations: iterations as f64 / trials,
        mean_edges_examined: examined as f64 / trials,
    };
    emit(&report, a.report.as_deref(), a.model.json, out)?;
    if !a.model.json {
        writeln!(
            out,
            "sigma = {:.6} over {} trials ({} seeds, {} model, {} engine)",
            report.sigma,
            report.trials,
            seeds.len(),
            report.model,
            report.engine
        )?;
        writeln!(
            out,
            "mean iterations {:.3}, mean edges examined {:.1}",
            report.mean_iterations, report.mean_edges_examined
        )?;
    }
    Ok(())
}

fn cmd_influence(a: InfluenceArgs, out: &mut dyn Write) -> CliResult<()> {
    let loaded = prepare_model(load_graph(&a.graph, a.model.seed)?, &a.model);
    let spec = ModelSpec::new(a.model.model, &loaded.graph)?;
    let cfg = EstimatorConfig::new(a.trials, a.model.seed).with_workers(a.parallel);
    if a.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let g = &loaded.graph;

    let started = Instant::now();
    let (seeds, gains, evaluations) = match a.method {
        Method::Celf | Method::Greedy => {
            let trace = if a.method == Method::Celf {
                select_celf(&spec, a.budget, cfg)?
            } else {
                select_greedy(&spec, a.budget, cfg)?
            };
            (trace.seeds, trace.marginal_gains, trace.evaluations)
        }
        Method::Degree => (select_degree(g, a.budget)?, Vec::new(), Vec::new()),
        Method::Random => (select_random(g, a.budget, a.model.seed)?, Vec::new(), Vec::new()),
    };
    let elapsed_secs = started.elapsed().as_secs_f64();

    let mut compared: Vec<(Method, SeedSet)> = vec![(a.method, seeds.clone())];
    for baseline in [Method::Degree, Method::Random] {
        if baseline != a.method {
            let s = match baseline {
                Method::Degree => select_degree(g, a.budget)?,
                _ => select_random(g, a.budget, a.model.seed)?,
            };
            compared.push((baseline, s));
        }
    }
    let mut series = Vec::with_capacity(compared.len());
    for (_, s) in &compared {
        series.push(timeseries_for(&spec, s, cfg)?);
    }

    if let Some(p) = &a.seeds_out {
        let mut w = create(p)?;
        for v in seeds.iter() {
            writeln!(w, "{}", loaded.ids.label(*v))?;
        }
        w.flush()?;
    }
    if let Some(p) = &a.export_timeseries {
        let named: Vec<(&str, &TimeSeries)> = compared
            .iter()
            .zip(&series)
            .map(|((m, _), s)| (m.name(), s))
            .collect();
        let mut w = create(p)?;
        write_comparison_csv(&named, &mut w)?;
        w.flush()?;
    }

    let report = SelectionReport {
        schema: SelectionReport::SCHEMA.into(),
        method: a.method.name().into(),
        model: a.model.model.name().into(),
        graph: summary(&loaded),
        budget: a.budget,
        trials: a.trials,
        global_seed: a.model.seed,
        seeds: labels(&loaded.ids, &seeds),
        total_evaluations: evaluations.iter().sum(),
        marginal_gains: gains,
        evaluations,
        sigma: series[0].final_value(),
        elapsed_secs,
        comparison: compared
            .iter()
            .zip(&series)
            .map(|((m, s), ts)| MethodOutcome {
                method: m.name().into(),
                seeds: labels(&loaded.ids, s),
                final_mean_activated: ts.final_value(),
            })
            .collect(),
    };
    emit(&report, a.report.as_deref(), a.model.json, out)?;
    if !a.model.json {
        writeln!(
            out,
            "{} selected {} seeds in {:.3}s ({} influence evaluations, R = {})",
            report.method, report.budget, report.elapsed_secs, report.total_evaluations, report.trials
        )?;
        writeln!(out, "seeds: {}", report.seeds.join(","))?;
        for c in &report.comparison {
            writeln!(out, "{:<8} final mean activated {:.3}", c.method, c.final_mean_activated)?;
        }
    }
    Ok(())
}

fn cmd_benchmark(a: BenchmarkArgs, out: &mut dyn Write) -> CliResult<()> {
    let loaded = prepare_model(load_graph(&a.graph, a.model.seed)?, &a.model);
    let spec = ModelSpec::new(a.model.model, &loaded.graph)?;
    let seeds = resolve_seeds(&a.seed_args, &loaded, a.model.seed)?;
    let report = run_benchmark(
        &spec,
        &seeds,
        &a.engines,
        a.trials,
        a.model.seed,
        loaded.weight_model.name(),
    )?;
    emit(&report, a.report.as_deref(), a.model.json, out)?;
    if !a.model.json {
        report.write_table(&mut *out)?;
    }
    Ok(())
}
