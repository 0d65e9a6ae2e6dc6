//! Drive the experiment pipeline from JSON: one run, then a small sweep
//! over step sizes and replicate seeds.
//!
//!     cargo run --example config_sweep

use netsis::experiment::{execute, run_sweep, ExperimentConfig, SweepConfig};

const BASE: &str = r#"{
  "network": { "generate": { "n": 40, "extra_edge_prob": 0.08, "seed": 1 } },
  "normalize_in_weights": true,
  "params": { "sampled": { "beta_range": [0.45, 0.55], "delta_range": [0.25, 0.35], "seed": 2 } },
  "h": 1.0,
  "x0": { "uniform_range": { "lo": 0.0, "hi": 0.2, "seed": 3 } },
  "horizon": 3000
}"#;

fn main() {
    let config: ExperimentConfig = serde_json::from_str(BASE).unwrap();
    let out = execute(&config, std::path::Path::new("."));
    let r = &out.report;
    println!(
        "single run: {:?}, rho = {:.4}, converged to {:?} after {:?} steps",
        r.regime.unwrap(),
        r.rho_threshold.unwrap(),
        r.converged_to.unwrap(),
        r.steps_to_tolerance
    );

    let dir = std::env::temp_dir().join("netsis-config-sweep");
    let sweep: SweepConfig = serde_json::from_str(&format!(
        r#"{{ "base": {BASE}, "grid": {{ "h": [0.25, 0.5, 1.0], "seeds": [1, 2] }}, "output_dir": "{}" }}"#,
        dir.display()
    ))
    .unwrap();
    let s = run_sweep(&sweep, &dir, Some(4)).unwrap();
    print!("{}", s.summary_csv);
    println!("per-cell outputs in {}", dir.display());
}
