use crate::error::{Error, Result};
use crate::graph::CsrGraph;
use crate::scalar::Weight;
use crate::NodeId;

use super::{Engine, ModelKind, ModelSpec, SimulationResult, TrialPlan};

const INACTIVE: u32 = u32::MAX;

#[derive(Clone, Copy)]
enum Thresholds<'a, W> {
    Hashed(TrialPlan),
    Fixed(&'a [W]),
}

impl<W: Weight> Thresholds<'_, W> {
    #[inline]
    fn of(&self, v: NodeId) -> W {
        match self {
            Thresholds::Hashed(plan) => W::from_f64_lossy(plan.threshold(v)),
            Thresholds::Fixed(t) => t[v as usize],
        }
    }
}

/// Reusable per-worker simulation state over a shared graph.
///
/// Scratch arrays are allocated once; after each frontier run only the
/// entries that run touched are reset, so a trial that activates few nodes
/// costs time proportional to their out-arcs, not to `n`.
pub struct Simulator<'g, W = f64> {
    graph: &'g CsrGraph<W>,
    kind: ModelKind,
    step_of: Vec<u32>,
    accum: Vec<W>,
    touched: Vec<NodeId>,
    thresholds: Vec<W>,
}

impl<'g, W: Weight> Simulator<'g, W> {
    pub fn new(graph: &'g CsrGraph<W>, kind: ModelKind) -> Self {
        let n = graph.node_count();
        Simulator {
            graph,
            kind,
            step_of: vec![INACTIVE; n],
            accum: if kind == ModelKind::Lt {
                vec![W::zero(); n]
            } else {
                Vec::new()
            },
            touched: Vec::new(),
            thresholds: Vec::new(),
        }
    }

    pub fn for_spec(spec: &ModelSpec<'g, W>) -> Self {
        Self::new(spec.graph(), spec.kind())
    }

    pub fn graph(&self) -> &'g CsrGraph<W> {
        self.graph
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn run(&mut self, seeds: &[NodeId], plan: TrialPlan, engine: Engine) -> Result<SimulationResult> {
        self.dispatch(seeds, plan, Thresholds::Hashed(plan), engine)
    }

    /// LT trial with caller-supplied thresholds (one per node) instead of hashed ones.
    pub fn run_lt_with_thresholds(
        &mut self,
        seeds: &[NodeId],
        thresholds: &[W],
        engine: Engine,
    ) -> Result<SimulationResult> {
        if self.kind != ModelKind::Lt {
            return Err(Error::ModelMismatch {
                expected: "lt",
                actual: self.kind.name(),
            });
        }
        if thresholds.len() != self.graph.node_count() {
            return Err(Error::Parameter(format!(
                "expected {} thresholds, got {}",
                self.graph.node_count(),
                thresholds.len()
            )));
        }
        self.dispatch(seeds, TrialPlan::new(0, 0), Thresholds::Fixed(thresholds), engine)
    }

    fn dispatch(
        &mut self,
        seeds: &[NodeId],
        plan: TrialPlan,
        thresholds: Thresholds<'_, W>,
        engine: Engine,
    ) -> Result<SimulationResult> {
        let mut out = SimulationResult::default();
        self.seed(seeds, &mut out)?;
        match (self.kind, engine) {
            (ModelKind::Ic, Engine::Frontier) => self.ic_frontier(plan, &mut out),
            (ModelKind::Ic, Engine::Naive) => self.ic_naive(plan, &mut out),
            (ModelKind::Lt, Engine::Frontier) => self.lt_frontier(thresholds, &mut out),
            (ModelKind::Lt, Engine::Naive) => self.lt_naive(thresholds, &mut out),
        }
        out.iterations = out.newly_active_per_iter.len();
        self.reset(&out.activated);
        Ok(out)
    }

    fn seed(&mut self, seeds: &[NodeId], out: &mut SimulationResult) -> Result<()> {
        let n = self.graph.node_count();
        for &s in seeds {
            if s as usize >= n {
                self.reset(&out.activated);
                return Err(Error::InvalidNode {
                    node: s as u64,
                    node_count: n,
                });
            }
            if self.step_of[s as usize] != INACTIVE {
                self.reset(&out.activated);
                return Err(Error::DuplicateSeed(s));
            }
            self.step_of[s as usize] = 0;
            out.activated.push(s);
        }
        out.activated.sort_unstable();
        out.newly_active_per_iter.push(seeds.len());
        Ok(())
    }

    fn reset(&mut self, activated: &[NodeId]) {
        for &v in activated {
            self.step_of[v as usize] = INACTIVE;
        }
        for &v in &self.touched {
            self.accum[v as usize] = W::zero();
        }
        self.touched.clear();
    }

    /// Seals the nodes appended since `start` as one step's activations.
    /// Returns false when nothing new was activated.
    fn close_step(out: &mut SimulationResult, start: usize) -> bool {
        let fresh = &mut out.activated[start..];
        if fresh.is_empty() {
            return false;
        }
        fresh.sort_unstable();
        out.newly_active_per_iter.push(fresh.len());
        true
    }

    fn ic_frontier(&mut self, plan: TrialPlan, out: &mut SimulationResult) {
        let g = self.graph;
        let mut begin = 0;
        let mut step = 0u32;
        loop {
            let end = out.activated.len();
            for i in begin..end {
                let u = out.activated[i];
                for slot in g.out_slots(u) {
                    out.edges_examined += 1;
                    let w = g.target(slot);
                    if self.step_of[w as usize] == INACTIVE
                        && plan.coin(slot, g.weight(slot).as_f64())
                    {
                        self.step_of[w as usize] = step + 1;
                        out.activated.push(w);
                    }
                }
            }
            if !Self::close_step(out, end) {
                break;
            }
            begin = end;
            step += 1;
        }
    }

    fn lt_frontier(&mut self, thresholds: Thresholds<'_, W>, out: &mut SimulationResult) {
        let g = self.graph;
        let mut begin = 0;
        let mut step = 0u32;
        loop {
            let end = out.activated.len();
            for i in begin..end {
                let u = out.activated[i];
                for slot in g.out_slots(u) {
                    out.edges_examined += 1;
                    let w = g.target(slot);
                    if self.step_of[w as usize] != INACTIVE {
                        continue;
                    }
                    let acc = &mut self.accum[w as usize];
                    if acc.is_zero() {
                        self.touched.push(w);
                    }
                    *acc = *acc + g.weight(slot);
                    if *acc > W::zero() && *acc >= thresholds.of(w) {
                        self.step_of[w as usize] = step + 1;
                        out.activated.push(w);
                    }
                }
            }
            if !Self::close_step(out, end) {
                break;
            }
            begin = end;
            step += 1;
        }
    }

    fn ic_naive(&mut self, plan: TrialPlan, out: &mut SimulationResult) {
        let g = self.graph;
        let n = g.node_count() as NodeId;
        let mut step = 0u32;
        loop {
            let start = out.activated.len();
            for v in 0..n {
                out.edges_examined += 1;
                if self.step_of[v as usize] != INACTIVE {
                    continue;
                }
                let (sources, slots) = g.in_arcs(v);
                for (&u, &slot) in sources.iter().zip(slots) {
                    out.edges_examined += 1;
                    if self.step_of[u as usize] == step && plan.coin(slot, g.weight(slot).as_f64()) {
                        self.step_of[v as usize] = step + 1;
                        out.activated.push(v);
                        break;
                    }
                }
            }
            if !Self::close_step(out, start) {
                break;
            }
            step += 1;
        }
    }

    fn lt_naive(&mut self, thresholds: Thresholds<'_, W>, out: &mut SimulationResult) {
        let g = self.graph;
        let n = g.node_count() as NodeId;
        let mut theta = std::mem::take(&mut self.thresholds);
        theta.clear();
        theta.extend((0..n).map(|v| thresholds.of(v)));
        let mut step = 0u32;
        loop {
            let start = out.activated.len();
            for v in 0..n {
                out.edges_examined += 1;
                if self.step_of[v as usize] != INACTIVE {
                    continue;
                }
                let (sources, slots) = g.in_arcs(v);
                out.edges_examined += sources.len() as u64;
                // Nodes marked during this step carry step + 1 and are excluded.
                let total: W = sources
                    .iter()
                    .zip(slots)
                    .filter(|(&u, _)| self.step_of[u as usize] <= step)
                    .map(|(_, &slot)| g.weight(slot))
                    .sum();
                if total > W::zero() && total >= theta[v as usize] {
                    self.step_of[v as usize] = step + 1;
                    out.activated.push(v);
                }
            }
            if !Self::close_step(out, start) {
                break;
            }
            step += 1;
        }
        self.thresholds = theta;
    }
}
