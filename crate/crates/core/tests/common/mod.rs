#![allow(dead_code)]

use netdiff::{build_csr, generate, GenSpec, Graph, WeightModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small random graph: ER, WS or random regular, optionally directed by
/// dropping one direction of some edges.
pub fn random_graph(rng: &mut impl Rng, max_n: usize) -> Graph {
    let n = rng.gen_range(2..=max_n);
    let spec = match rng.gen_range(0..3) {
        0 => GenSpec::erdos_renyi(n, rng.gen_range(0.0..0.2), rng.gen()),
        1 if n >= 5 => {
            let k = 2 * rng.gen_range(1..=((n - 1) / 2).min(3));
            GenSpec::watts_strogatz(n, k, rng.gen_range(0.0..0.3), rng.gen())
        }
        _ => {
            let k = rng.gen_range(0..n.min(5));
            let n = if (n * k) % 2 == 1 { n + 1 } else { n };
            GenSpec::random_regular(n, k, rng.gen())
        }
    };
    let mut edges = generate::<f64>(&spec).unwrap();
    if rng.gen_bool(0.5) {
        // Orient each edge randomly, sometimes keeping both directions.
        edges.directed = true;
        let mut arcs = Vec::new();
        for &(u, v, w) in &edges.edges {
            match rng.gen_range(0..3) {
                0 => arcs.push((u, v, w)),
                1 => arcs.push((v, u, w)),
                _ => {
                    arcs.push((u, v, w));
                    arcs.push((v, u, w));
                }
            }
        }
        edges.edges = arcs;
    }
    build_csr(&edges).unwrap().0
}

pub fn random_weights(rng: &mut impl Rng, g: &Graph) -> (Graph, WeightModel) {
    let model = [WeightModel::Tv, WeightModel::Ur, WeightModel::Wc][rng.gen_range(0..3)];
    (g.with_weight_model(model, rng.gen()), model)
}

pub fn random_seeds(rng: &mut impl Rng, n: usize, max: usize) -> Vec<u32> {
    let k = rng.gen_range(0..=max.min(n));
    let mut nodes: Vec<u32> = (0..n as u32).collect();
    for i in 0..k {
        let j = rng.gen_range(i..n);
        nodes.swap(i, j);
    }
    nodes.truncate(k);
    nodes
}

/// Prints one acceptance line and fails the test when `pass` is false.
pub fn verdict(name: &str, pass: bool, detail: String) {
    println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{name}: {detail}");
}
