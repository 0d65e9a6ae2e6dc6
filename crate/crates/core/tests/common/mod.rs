#![allow(dead_code)]

use netsis::graphio::{normalize_in_weights, random_strongly_connected, Graph};
use netsis::model::{build_and_validate, sample_params, SisModel};
use netsis::spectral::{classify_regime, Regime};
use netsis::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random strongly connected graph with heterogeneous weights, normalized so
/// every row sums to one.
pub fn weighted_graph(r: &mut ChaCha8Rng, n: usize) -> Graph {
    let g = random_strongly_connected(n, r.gen_range(0.05..0.4), r.gen());
    let mut w = g.weights().clone();
    for i in 0..n {
        for j in 0..n {
            if w[(i, j)] > 0.0 {
                w[(i, j)] = r.gen_range(0.2..3.0);
            }
        }
    }
    normalize_in_weights(&Graph::from_weights(w).unwrap()).unwrap()
}

/// Seeded endemic-regime models with all curing rates positive.
pub fn endemic_models(count: usize, seed: u64) -> Vec<SisModel> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let n = r.gen_range(3..=30);
        let g = weighted_graph(&mut r, n);
        let h = if r.gen_bool(0.5) { 1.0 } else { 0.5 };
        let p = sample_params((0.3, 0.7), (0.05, 0.3), h, n, r.gen()).unwrap();
        let Ok((m, _)) = build_and_validate(&g, &p) else {
            continue;
        };
        if classify_regime(&m).unwrap().regime == Regime::EndemicExists {
            out.push(m);
        }
    }
    out
}

/// Long-run simulation oracle: iterate the dynamics `steps` times (stopping
/// once a state repeats exactly, after which nothing changes).
pub fn simulate_long(model: &SisModel, x0: &[f64], steps: usize) -> Vec<f64> {
    let mut x = x0.to_vec();
    for _ in 0..steps {
        let next = model.step(&x).unwrap();
        if next == x {
            break;
        }
        x = next;
    }
    x
}

pub fn below(r: &mut ChaCha8Rng, x_star: &[f64]) -> Vec<f64> {
    x_star.iter().map(|&v| v * r.gen_range(0.0..=1.0)).collect()
}

pub fn above(r: &mut ChaCha8Rng, x_star: &[f64]) -> Vec<f64> {
    x_star
        .iter()
        .map(|&v| v + (1.0 - v) * r.gen_range(0.0..=1.0))
        .collect()
}

pub fn uniform(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| r.gen_range(0.0..=1.0)).collect()
}

pub fn is_irreducible(m: &Matrix) -> bool {
    netsis::spectral::is_irreducible(m)
}
