//! Solve for the endemic equilibrium and print the per-node bounds.
//!
//!     cargo run --example endemic_equilibrium

use netsis::equilibrium::{solve_endemic, SolveOptions};
use netsis::graphio::{normalize_in_weights, random_strongly_connected};
use netsis::model::{build_and_validate, sample_params};

fn main() {
    let g = normalize_in_weights(&random_strongly_connected(12, 0.2, 3)).unwrap();
    let p = sample_params((0.45, 0.55), (0.25, 0.35), 1.0, g.n(), 9).unwrap();
    let (model, _) = build_and_validate(&g, &p).unwrap();

    let eq = solve_endemic(&model, &SolveOptions::default()).unwrap();
    println!(
        "converged in {} iterations, residual {:.1e}",
        eq.iterations, eq.residual_inf
    );
    let b = &eq.bounds;
    println!(
        "lower bound (certified) {:.4}, (a priori) {:.4}",
        b.lo_certified, b.lo_apriori
    );
    println!("node   x*       upper");
    for (i, (x, hi)) in eq.x_star.iter().zip(&b.hi).enumerate() {
        println!("{i:>4}   {x:.5}  {hi:.5}");
    }
}
