//! Starting entirely below (or above) the endemic state, trajectories never
//! cross it.
//!
//!     cargo run --example no_overshoot

use netsis::equilibrium::{solve_endemic, SolveOptions};
use netsis::graphio::{normalize_in_weights, random_strongly_connected};
use netsis::model::{build_and_validate, sample_params};
use netsis::stability::{overshoot_check, DEFAULT_OVERSHOOT_SLACK};

fn main() {
    let g = normalize_in_weights(&random_strongly_connected(30, 0.1, 8)).unwrap();
    let p = sample_params((0.45, 0.55), (0.25, 0.35), 1.0, g.n(), 2).unwrap();
    let (model, _) = build_and_validate(&g, &p).unwrap();
    let eq = solve_endemic(&model, &SolveOptions::default()).unwrap();

    let low: Vec<f64> = eq.x_star.iter().map(|v| 0.1 * v).collect();
    let high: Vec<f64> = eq.x_star.iter().map(|v| v + 0.9 * (1.0 - v)).collect();
    for (name, x0) in [("below", low), ("above", high), ("mixed", vec![0.4; g.n()])] {
        let traj = model.simulate(&x0, 1000, 1e-13).unwrap();
        let o = overshoot_check(&traj, &eq.x_star, DEFAULT_OVERSHOOT_SLACK);
        println!(
            "{name}: class {:?}, {} steps, components above x* {}, below x* {}, verdict {:?}",
            o.initial_class,
            traj.steps(),
            o.up,
            o.down,
            o.verdict
        );
    }
}
