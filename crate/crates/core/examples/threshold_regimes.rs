//! Classify the long-run regime of a network from `ρ(I - hD + hB)` and
//! confirm it by simulation.
//!
//!     cargo run --example threshold_regimes

use netsis::graphio::{normalize_in_weights, random_strongly_connected};
use netsis::model::{build_and_validate, sample_params};
use netsis::spectral::classify_regime;

fn main() {
    let g = normalize_in_weights(&random_strongly_connected(50, 0.06, 11)).unwrap();
    let x0 = vec![0.1; g.n()];

    for (name, beta) in [("weak", (0.15, 0.25)), ("strong", (0.45, 0.55))] {
        let p = sample_params(beta, (0.25, 0.35), 1.0, g.n(), 5).unwrap();
        let (model, _) = build_and_validate(&g, &p).unwrap();
        let label = classify_regime(&model).unwrap();
        let traj = model.simulate(&x0, 3000, 1e-12).unwrap();
        let mean = traj.last().iter().sum::<f64>() / g.n() as f64;
        println!(
            "{name:>6}: rho = {:.4} -> {:?}; mean infection after {} steps = {mean:.4}",
            label.rho_threshold,
            label.regime,
            traj.steps()
        );
    }
}
