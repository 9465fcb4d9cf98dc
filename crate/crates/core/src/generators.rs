//! Synthetic undirected graphs for benchmarks: Erdős–Rényi, Watts–Strogatz
//! and random regular.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::EdgeList;
use crate::scalar::Weight;

const REGULAR_MAX_ATTEMPTS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum GenKind {
    #[value(name = "er", alias = "erdos-renyi")]
    ErdosRenyi,
    #[value(name = "ws", alias = "watts-strogatz")]
    WattsStrogatz,
    #[value(name = "rr", alias = "random-regular")]
    RandomRegular,
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GenKind::ErdosRenyi => "erdos_renyi",
            GenKind::WattsStrogatz => "watts_strogatz",
            GenKind::RandomRegular => "random_regular",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub kind: GenKind,
    pub n: usize,
    /// ER edge probability or WS rewiring probability.
    pub p: f64,
    /// WS ring neighbours or regular degree.
    pub k: usize,
    pub seed: u64,
}

impl GenSpec {
    pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Self {
        GenSpec {
            kind: GenKind::ErdosRenyi,
            n,
            p,
            k: 0,
            seed,
        }
    }

    pub fn watts_strogatz(n: usize, k: usize, p: f64, seed: u64) -> Self {
        GenSpec {
            kind: GenKind::WattsStrogatz,
            n,
            p,
            k,
            seed,
        }
    }

    pub fn random_regular(n: usize, k: usize, seed: u64) -> Self {
        GenSpec {
            kind: GenKind::RandomRegular,
            n,
            p: 0.0,
            k,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Parameter(msg));
        if self.n < 1 {
            return bad("n must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.p) {
            return bad(format!("p = {} is outside [0, 1]", self.p));
        }
        if self.n > u32::MAX as usize {
            return bad(format!("n = {} exceeds the node id range", self.n));
        }
        match self.kind {
            GenKind::ErdosRenyi => Ok(()),
            GenKind::WattsStrogatz if !self.k.is_multiple_of(2) || self.k >= self.n => {
                bad(format!("watts-strogatz needs even k < n (k = {}, n = {})", self.k, self.n))
            }
            GenKind::RandomRegular if self.k >= self.n || !(self.n * self.k).is_multiple_of(2) => bad(format!(
                "random regular needs k < n and n*k even (k = {}, n = {})",
                self.k, self.n
            )),
            _ => Ok(()),
        }
    }
}

/// Generates an undirected edge list; identical specs give identical output.
pub fn generate<W: Weight>(spec: &GenSpec) -> Result<EdgeList<W>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let pairs = match spec.kind {
        GenKind::ErdosRenyi => erdos_renyi(spec.n, spec.p, &mut rng),
        GenKind::WattsStrogatz => watts_strogatz(spec.n, spec.k, spec.p, &mut rng),
        GenKind::RandomRegular => random_regular(spec.n, spec.k, &mut rng)?,
    };
    Ok(EdgeList::from_pairs(false, pairs).with_node_count(spec.n))
}

/// G(n, p) by geometric skipping over the lower-triangular pair index.
fn erdos_renyi(n: usize, p: f64, rng: &mut impl Rng) -> Vec<(u64, u64)> {
    let mut edges = Vec::new();
    if p <= 0.0 || n < 2 {
        return edges;
    }
    if p >= 1.0 {
        for v in 1..n as u64 {
            edges.extend((0..v).map(|w| (v, w)));
        }
        return edges;
    }
    let log_q = (1.0 - p).ln();
    let (mut v, mut w) = (1u64, -1i64);
    let n = n as u64;
    while v < n {
        let r: f64 = 1.0 - rng.gen::<f64>();
        w += 1 + (r.ln() / log_q).floor() as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((v, w as u64));
        }
    }
    edges
}

fn watts_strogatz(n: usize, k: usize, p: f64, rng: &mut impl Rng) -> Vec<(u64, u64)> {
    let mut adjacent: Vec<HashSet<u64>> = vec![HashSet::new(); n];
    let mut edges = Vec::with_capacity(n * k / 2);
    for j in 1..=k / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            edges.push((u as u64, v as u64));
            adjacent[u].insert(v as u64);
            adjacent[v].insert(u as u64);
        }
    }
    // Rewire the far endpoint of each lattice edge, ring by ring.
    for j in 1..=k / 2 {
        for u in 0..n {
            let idx = (j - 1) * n + u;
            if rng.gen::<f64>() >= p || adjacent[u].len() >= n - 1 {
                continue;
            }
            let (a, b) = edges[idx];
            let target = loop {
                let w = rng.gen_range(0..n as u64);
                if w != a && !adjacent[u].contains(&w) {
                    break w;
                }
            };
            adjacent[a as usize].remove(&b);
            adjacent[b as usize].remove(&a);
            adjacent[a as usize].insert(target);
            adjacent[target as usize].insert(a);
            edges[idx] = (a, target);
        }
    }
    edges
}

/// Pairing model: shuffle the remaining stubs, keep every valid pair, and
/// retry the leftovers; restart from scratch when no valid pair is left.
fn random_regular(n: usize, k: usize, rng: &mut impl Rng) -> Result<Vec<(u64, u64)>> {
    if k == 0 {
        return Ok(Vec::new());
    }
    for _ in 0..REGULAR_MAX_ATTEMPTS {
        if let Some(edges) = try_pairing(n, k, rng) {
            return Ok(edges);
        }
    }
    Err(Error::Parameter(format!(
        "no simple {k}-regular graph on {n} nodes after {REGULAR_MAX_ATTEMPTS} attempts"
    )))
}

fn try_pairing(n: usize, k: usize, rng: &mut impl Rng) -> Option<Vec<(u64, u64)>> {
    let mut edges = Vec::with_capacity(n * k / 2);
    let mut present: HashSet<(u64, u64)> = HashSet::with_capacity(n * k / 2);
    let mut stubs: Vec<u64> = (0..n as u64).flat_map(|v| std::iter::repeat_n(v, k)).collect();
    while !stubs.is_empty() {
        stubs.shuffle(rng);
        let mut leftover: BTreeMap<u64, usize> = BTreeMap::new();
        for pair in stubs.chunks_exact(2) {
            let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if a != b && present.insert((a, b)) {
                edges.push((a, b));
            } else {
                *leftover.entry(a).or_default() += 1;
                *leftover.entry(b).or_default() += 1;
            }
        }
        if leftover.is_empty() {
            break;
        }
        let nodes: Vec<u64> = leftover.keys().copied().collect();
        let pairable = nodes
            .iter()
            .enumerate()
            .any(|(i, &a)| nodes[i + 1..].iter().any(|&b| !present.contains(&(a, b))));
        if !pairable {
            return None;
        }
        stubs = leftover
            .into_iter()
            .flat_map(|(v, c)| std::iter::repeat_n(v, c))
            .collect();
    }
    Some(edges)
}
