//! Build the error system around the endemic state and follow the linear
//! Lyapunov function along a trajectory.
//!
//!     cargo run --example lyapunov_trace

use netsis::equilibrium::{solve_endemic, SolveOptions};
use netsis::graphio::{normalize_in_weights, random_strongly_connected};
use netsis::model::{build_and_validate, sample_params};
use netsis::stability::{build_error_system, convergence_rate, lyapunov_trace};

fn main() {
    let g = normalize_in_weights(&random_strongly_connected(20, 0.15, 4)).unwrap();
    let p = sample_params((0.4, 0.6), (0.2, 0.3), 1.0, g.n(), 6).unwrap();
    let (model, _) = build_and_validate(&g, &p).unwrap();
    let eq = solve_endemic(&model, &SolveOptions::default()).unwrap();
    let es = build_error_system(&model, &eq.x_star).unwrap();
    println!(
        "rho(Xi) = {:.6}, |F mu - mu| = {:.1e}",
        es.rho_xi, es.f_mu_residual
    );

    let mut x0 = vec![0.0; g.n()];
    x0[0] = 0.9;
    let traj = model.simulate(&x0, 400, 0.0).unwrap();
    let l = lyapunov_trace(&model, &eq.x_star, &es, &traj).unwrap();
    println!(
        "positive from step {}; monotone {}, identity error {:.1e}",
        l.start, l.monotone, l.max_identity_error
    );
    for (k, v) in l.values.iter().enumerate().step_by(25).take(8) {
        println!("  V({:>3}) = {v:.3e}", k + l.start);
    }
    if let Some(rate) = convergence_rate(&traj, &eq.x_star) {
        println!("empirical rate {rate:.6}");
    }
}
