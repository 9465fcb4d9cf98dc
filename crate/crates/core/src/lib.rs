//! Independent cascade (IC) and linear threshold (LT) diffusion over
//! compressed-sparse-row graphs.
//!
//! The simulation engines only touch the out-arcs of nodes activated in the
//! previous step, so the work of a trial is proportional to the arcs leaving
//! activated nodes rather than to the size of the graph. A naive full-scan
//! engine is kept alongside as a reference implementation and benchmark
//! baseline.
//!
//! On top of the engines sit a Monte-Carlo influence estimator, seed
//! selection (greedy, CELF, highest degree, random), synthetic graph
//! generators, SNAP-style edge-list I/O and a benchmark harness.
//!
//! Arc weights are generic over the scalar type ([`Weight`]); [`Graph`] is the
//! `f64` graph used by the CLI and [`Graph32`] a compact `f32` variant.

pub mod bench;
pub mod cli;
pub mod diffusion;
pub mod error;
pub mod generators;
pub mod graph;
pub mod influence;
pub mod io;
pub mod scalar;

pub use diffusion::{
    deviate, live_edge_reachability, simulate, simulate_ic, simulate_lt, Engine, ModelKind,
    ModelSpec, SimulationResult, Simulator, TrialPlan,
};
pub use error::{Error, Result};
pub use generators::{generate, GenKind, GenSpec};
pub use graph::{build_csr, BuildStats, CsrGraph, EdgeList, WeightModel};
pub use influence::{
    estimate_sigma, select_celf, select_degree, select_greedy, select_random, EstimatorConfig,
    SeedSet, SelectionTrace,
};
pub use scalar::Weight;

/// Dense internal node identifier.
pub type NodeId = u32;

/// Graph with 64-bit arc probabilities (the default everywhere).
pub type Graph = CsrGraph<f64>;
/// Graph with 32-bit arc probabilities, halving weight storage.
pub type Graph32 = CsrGraph<f32>;
/// Edge list carrying 64-bit weights.
pub type Edges = EdgeList<f64>;
