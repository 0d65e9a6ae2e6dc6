//! Acceptance criteria. Every test prints one `[PASS]`/`[FAIL]` line.
//!
//! Runs as a plain binary under `cargo test`, so the verdict lines always
//! show up in the output. Exits nonzero if any criterion fails.

mod common;

use std::path::Path;
use std::time::{Duration, Instant};

use common::*;
use netsis::equilibrium::{residual, solve_endemic, SolveOptions};
use netsis::experiment::{execute, run_experiment, run_sweep, ExperimentConfig, SweepConfig};
use netsis::graphio::{normalize_in_weights, parse_edge_list, random_strongly_connected};
use netsis::matrix::Matrix;
use netsis::model::{build_and_validate, sample_params, SisParams};
use netsis::spectral::{classify_regime, perron, PerronOptions, Regime};
use netsis::stability::{
    build_error_system, classify_initial, convergence_rate, lyapunov_trace, ConvergedTo,
    InitialClass,
};
use rand::Rng;

const N_BENCH: usize = 67;
const BENCH_EDGE_PROB: f64 = 0.05;
const BENCH_GRAPH_SEED: u64 = 4242;
const BENCH_PARAM_SEED: u64 = 7;

fn verdict(id: &str, title: &str, pass: bool, detail: String) {
    println!(
        "[{}] {id} {title}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    if !pass {
        panic!("{id} failed");
    }
}

fn bench_config(beta: [f64; 2], x0: &str, horizon: usize) -> ExperimentConfig {
    serde_json::from_str(&format!(
        r#"{{
          "network": {{ "generate": {{ "n": {N_BENCH}, "extra_edge_prob": {BENCH_EDGE_PROB}, "seed": {BENCH_GRAPH_SEED} }} }},
          "normalize_in_weights": true,
          "params": {{ "sampled": {{ "beta_range": [{}, {}], "delta_range": [0.25, 0.35], "seed": {BENCH_PARAM_SEED} }} }},
          "h": 1.0,
          "x0": {x0},
          "horizon": {horizon},
          "stop_tol": 0
        }}"#,
        beta[0], beta[1]
    ))
    .unwrap()
}

fn ac1_disease_free_from_low_infection() {
    let start = Instant::now();
    let cfg = bench_config(
        [0.15, 0.25],
        r#"{ "uniform_range": { "lo": 0.0, "hi": 0.2, "seed": 11 } }"#,
        1000,
    );
    let out = execute(&cfg, Path::new("."));
    let elapsed = start.elapsed();
    let r = &out.report;
    let traj = out.trajectory.as_ref().unwrap();
    let rho = r.rho_threshold.unwrap();
    let hit = traj
        .states
        .iter()
        .position(|s| s.iter().all(|&v| v.abs() < 1e-6));
    let pass = r.is_ok()
        && r.regime == Some(Regime::DiseaseFreeOnly)
        && rho < 1.0
        && hit.is_some_and(|k| k <= 1000)
        && elapsed < Duration::from_secs(1);
    verdict(
        "AC1",
        "disease-free regime dies out",
        pass,
        format!("rho = {rho:.6}, |x(k)| < 1e-6 at k = {hit:?}, runtime {elapsed:?}"),
    );
}

fn ac2_endemic_from_below() {
    let start = Instant::now();
    let cfg = bench_config(
        [0.45, 0.55],
        r#"{ "uniform_range": { "lo": 0.0, "hi": 0.2, "seed": 12 } }"#,
        5000,
    );
    let out = execute(&cfg, Path::new("."));
    let elapsed = start.elapsed();
    let r = &out.report;
    let x_star = r.x_star.clone().unwrap();
    let min_star = x_star.iter().copied().fold(f64::INFINITY, f64::min);
    let overshoot = r.overshoot.unwrap();
    let pass = r.is_ok()
        && r.rho_threshold.unwrap() > 1.0
        && min_star > 0.2
        && r.initial_class == Some(InitialClass::Dl)
        && r.converged_to == Some(ConvergedTo::Endemic)
        && r.steps_to_tolerance.is_some_and(|k| k <= 5000)
        && overshoot.up == 0
        && elapsed < Duration::from_secs(1);
    verdict(
        "AC2",
        "endemic regime from below, no up-overshoot",
        pass,
        format!(
            "rho = {:.6}, min x* = {min_star:.4}, converged at k = {:?}, up = {}, runtime {elapsed:?}",
            r.rho_threshold.unwrap(),
            r.steps_to_tolerance,
            overshoot.up
        ),
    );
}

fn ac3_endemic_from_above_and_mixed() {
    let cfg = bench_config(
        [0.45, 0.55],
        r#"{ "uniform_range": { "lo": 0.5, "hi": 0.8, "seed": 13 } }"#,
        5000,
    );
    let out = execute(&cfg, Path::new("."));
    let r = &out.report;
    let x_star = r.x_star.clone().unwrap();
    let max_star = x_star.iter().copied().fold(0.0, f64::max);
    let x0 = &out.trajectory.as_ref().unwrap().states[0];
    let open_start = x0.iter().all(|&v| v > 0.5 && v < 0.8);
    let down = r.overshoot.unwrap().down;
    let high_pass = r.is_ok()
        && max_star < 0.5
        && open_start
        && r.initial_class == Some(InitialClass::Dh)
        && down == 0
        && r.converged_to == Some(ConvergedTo::Endemic)
        && r.steps_to_tolerance.is_some_and(|k| k <= 5000);

    // Mixed start: U[0, 1]^N, excluding the zero state.
    let cfg = bench_config(
        [0.45, 0.55],
        r#"{ "uniform_range": { "lo": 0.0, "hi": 1.0, "seed": 14 } }"#,
        5000,
    );
    let mixed = execute(&cfg, Path::new("."));
    let m = &mixed.report;
    let mixed_pass = m.is_ok()
        && m.initial_class == Some(InitialClass::Mixed)
        && m.overshoot_verdict.is_none()
        && m.converged_to == Some(ConvergedTo::Endemic);
    verdict(
        "AC3",
        "endemic regime from above (no down-overshoot) and from a mixed start",
        high_pass && mixed_pass,
        format!(
            "max x* = {max_star:.4}, down = {down}, converged at k = {:?}; mixed class {:?} converged at k = {:?}",
            r.steps_to_tolerance, m.initial_class, m.steps_to_tolerance
        ),
    );
}

fn ac4_invariance_of_unit_cube() {
    let start = Instant::now();
    let mut r = rng(4);
    let (mut worst_lo, mut worst_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut zero_ok = true;
    let mut survive_ok = true;
    for _ in 0..100 {
        let n = r.gen_range(1..=30);
        let g = if n == 1 {
            parse_edge_list("0 0").unwrap()
        } else {
            weighted_graph(&mut r, n)
        };
        let h = r.gen_range(0.1..=1.0);
        let p = sample_params((0.01, 0.7), (0.0, 0.3), h, n, r.gen()).unwrap();
        let (m, rep) = build_and_validate(&g, &p).unwrap();
        assert!(rep.worst_value <= 1.0);
        let x0 = uniform(&mut r, n);
        let t = m.simulate(&x0, 200, 0.0).unwrap();
        for s in &t.states {
            for &v in s {
                worst_lo = worst_lo.min(v);
                worst_hi = worst_hi.max(v);
            }
            survive_ok &= s.iter().any(|&v| v != 0.0);
        }
        let z = m.simulate(&vec![0.0; n], 200, 0.0).unwrap();
        zero_ok &= z.states.iter().all(|s| s.iter().all(|&v| v == 0.0));
    }
    let elapsed = start.elapsed();
    let pass = worst_lo >= -1e-15
        && worst_hi <= 1.0 + 1e-15
        && zero_ok
        && survive_ok
        && elapsed < Duration::from_secs(5);
    verdict(
        "AC4",
        "states stay in [0, 1]^N",
        pass,
        format!(
            "min component {worst_lo:e}, max component {worst_hi}, zero absorbing {zero_ok}, nonzero persists {survive_ok}, runtime {elapsed:?}"
        ),
    );
}

fn ac5_equilibrium_matches_simulation() {
    let models = endemic_models(50, 5);
    let (mut worst_gap, mut worst_res) = (0.0f64, 0.0f64);
    let mut bounds_ok = true;
    for m in &models {
        let eq = solve_endemic(m, &SolveOptions::default()).unwrap();
        let sim = simulate_long(m, &vec![0.5; m.n()], 100_000);
        let gap = eq
            .x_star
            .iter()
            .zip(&sim)
            .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        worst_gap = worst_gap.max(gap);
        let res = residual(m, &eq.x_star)
            .iter()
            .fold(0.0f64, |a, v| a.max(v.abs()));
        worst_res = worst_res.max(res);
        let b = &eq.bounds;
        bounds_ok &= b.lo_apriori <= b.lo_certified
            && eq
                .x_star
                .iter()
                .zip(&b.hi)
                .all(|(&x, &hi)| b.lo_certified <= x && x <= hi);
    }
    verdict(
        "AC5",
        "solver equilibrium vs long-run simulation",
        worst_gap < 1e-8 && worst_res < 1e-10 && bounds_ok,
        format!("max gap {worst_gap:e}, max residual {worst_res:e}, bounds hold {bounds_ok}"),
    );
}

fn ac6_spectral_certificates() {
    let models = endemic_models(50, 5);
    let (mut worst_fmu, mut worst_rho_f, mut max_rho_xi) = (0.0f64, 0.0f64, 0.0f64);
    let mut structure_ok = true;
    for m in &models {
        let eq = solve_endemic(m, &SolveOptions::default()).unwrap();
        let es = build_error_system(m, &eq.x_star).unwrap();
        worst_fmu = worst_fmu.max(es.f_mu_residual);
        worst_rho_f = worst_rho_f.max((es.rho_f - 1.0).abs());
        max_rho_xi = max_rho_xi.max(es.rho_xi);
        let xi_x = es.xi.mul_vec(&eq.x_star);
        structure_ok &= es.xi.is_nonnegative()
            && is_irreducible(&es.xi)
            && xi_x.iter().zip(&eq.x_star).all(|(a, b)| a < b);
    }

    let g = normalize_in_weights(&parse_edge_list("0 1\n1 0").unwrap()).unwrap();
    let (m, _) = build_and_validate(&g, &SisParams::homogeneous(2, 0.5, 0.25, 1.0)).unwrap();
    let es = build_error_system(&m, &[0.5, 0.5]).unwrap();
    let want = Matrix::from_rows(&[vec![0.5, 0.25], vec![0.25, 0.5]]);
    let two_node = es.xi.max_abs_diff(&want) < 1e-12 && (es.rho_xi - 0.75).abs() < 1e-12;

    verdict(
        "AC6",
        "error-system certificates",
        worst_fmu < 1e-8
            && worst_rho_f < 1e-8
            && max_rho_xi < 1.0 - 1e-12
            && structure_ok
            && two_node,
        format!(
            "max |F mu - mu| {worst_fmu:e}, max |rho(F) - 1| {worst_rho_f:e}, max rho(Xi) {max_rho_xi:.6}, Xi x* << x* {structure_ok}, two-node example {two_node}"
        ),
    );
}

fn ac7_lyapunov_monotone() {
    let models = endemic_models(10, 7);
    let mut r = rng(70);
    let mut worst_identity = 0.0f64;
    let mut worst_increase = f64::NEG_INFINITY;
    let mut all_monotone = true;
    let mut runs = 0;
    for m in &models {
        let eq = solve_endemic(m, &SolveOptions::default()).unwrap();
        let es = build_error_system(m, &eq.x_star).unwrap();
        for class in [InitialClass::Dl, InitialClass::Dh, InitialClass::Mixed] {
            for _ in 0..20 {
                let x0 = loop {
                    let x0 = match class {
                        InitialClass::Dl => below(&mut r, &eq.x_star),
                        InitialClass::Dh => above(&mut r, &eq.x_star),
                        _ => uniform(&mut r, m.n()),
                    };
                    if classify_initial(&x0, &eq.x_star) == class {
                        break x0;
                    }
                };
                let t = m.simulate(&x0, 2000, 0.0).unwrap();
                let l = lyapunov_trace(m, &eq.x_star, &es, &t).unwrap();
                worst_identity = worst_identity.max(l.max_identity_error);
                for w in l.values.windows(2) {
                    worst_increase = worst_increase.max(w[1] - w[0]);
                }
                all_monotone &= l.monotone;
                runs += 1;
            }
        }
    }
    verdict(
        "AC7",
        "Lyapunov function nonincreasing",
        all_monotone && worst_increase <= 1e-12 && worst_identity <= 1e-12,
        format!(
            "{runs} trajectories, max V(k+1) - V(k) = {worst_increase:e}, max identity error {worst_identity:e}"
        ),
    );
}

fn ac8_contraction_rate_bounds() {
    let models = endemic_models(10, 8);
    let mut r = rng(80);
    let mut worst_endemic = f64::NEG_INFINITY;
    for m in &models {
        let eq = solve_endemic(m, &SolveOptions::default()).unwrap();
        let es = build_error_system(m, &eq.x_star).unwrap();
        for _ in 0..5 {
            let x0 = above(&mut r, &eq.x_star);
            let t = m.simulate(&x0, 3000, 0.0).unwrap();
            if let Some(rate) = convergence_rate(&t, &eq.x_star) {
                worst_endemic = worst_endemic.max(rate - es.rho_xi);
            }
        }
    }

    let mut worst_free = f64::NEG_INFINITY;
    let mut free_models = 0;
    while free_models < 10 {
        let n = r.gen_range(3..=30);
        let g = weighted_graph(&mut r, n);
        let p = sample_params((0.15, 0.25), (0.25, 0.35), 1.0, n, r.gen()).unwrap();
        let (m, _) = build_and_validate(&g, &p).unwrap();
        let label = classify_regime(&m).unwrap();
        if label.regime != Regime::DiseaseFreeOnly {
            continue;
        }
        free_models += 1;
        for _ in 0..5 {
            let x0 = uniform(&mut r, n);
            let t = m.simulate(&x0, 3000, 0.0).unwrap();
            if let Some(rate) = convergence_rate(&t, &vec![0.0; n]) {
                worst_free = worst_free.max(rate - label.rho_threshold);
            }
        }
    }

    let cycle = normalize_in_weights(&parse_edge_list("0 1\n1 0").unwrap()).unwrap();
    let (m, _) = build_and_validate(&cycle, &SisParams::homogeneous(2, 0.5, 0.25, 1.0)).unwrap();
    let t = m.simulate(&[0.9, 0.9], 400, 0.0).unwrap();
    let two_node = convergence_rate(&t, &[0.5, 0.5]).unwrap();

    verdict(
        "AC8",
        "empirical contraction rates",
        worst_endemic <= 0.01 && worst_free <= 0.01 && two_node <= 0.76,
        format!(
            "max (rate - rho(Xi)) = {worst_endemic:.4}, max (rate - rho(I - hD + hB)) = {worst_free:.4}, two-node rate {two_node:.4}"
        ),
    );
}

fn ac9_determinism() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("net.txt"),
        random_strongly_connected(30, 0.1, 5).to_edge_list(),
    )
    .unwrap();
    let config_text = |tag: &str| {
        format!(
            r#"{{
              "network": {{ "edge_list": "net.txt" }},
              "normalize_in_weights": true,
              "params": {{ "sampled": {{ "beta_range": [0.45, 0.55], "delta_range": [0.25, 0.35], "seed": 3 }} }},
              "h": 1.0,
              "x0": {{ "uniform_range": {{ "lo": 0.0, "hi": 0.2, "seed": 4 }} }},
              "horizon": 3000,
              "output": {{ "trajectory_csv": "{tag}/traj.csv", "report_json": "{tag}/report.json" }}
            }}"#
        )
    };
    for tag in ["a", "b"] {
        let cfg: ExperimentConfig = serde_json::from_str(&config_text(tag)).unwrap();
        assert!(run_experiment(&cfg, dir.path()).unwrap().is_ok());
    }
    let read = |p: &str| std::fs::read(dir.path().join(p)).unwrap();
    let runs_equal =
        read("a/traj.csv") == read("b/traj.csv") && read("a/report.json") == read("b/report.json");

    let sweep_text = |out: &str| {
        format!(
            r#"{{
              "base": {},
              "grid": {{ "h": [0.25, 0.5, 1.0], "seeds": [1, 2, 3] }},
              "output_dir": "{out}"
            }}"#,
            config_text("unused")
        )
    };
    let one: SweepConfig = serde_json::from_str(&sweep_text("s1")).unwrap();
    let eight: SweepConfig = serde_json::from_str(&sweep_text("s8")).unwrap();
    let a = run_sweep(&one, dir.path(), Some(1)).unwrap();
    let b = run_sweep(&eight, dir.path(), Some(8)).unwrap();
    let mut sweeps_equal =
        a.summary_csv == b.summary_csv && read("s1/summary.csv") == read("s8/summary.csv");
    for cell in &a.cells {
        let f = format!("cell_{:04}/report.json", cell.id);
        let t = format!("cell_{:04}/trajectory.csv", cell.id);
        sweeps_equal &= read(&format!("s1/{f}")) == read(&format!("s8/{f}"))
            && read(&format!("s1/{t}")) == read(&format!("s8/{t}"));
    }
    verdict(
        "AC9",
        "byte-identical reruns and worker-count-independent sweeps",
        runs_equal && sweeps_equal,
        format!(
            "run twice identical {runs_equal}, 1 vs 8 workers identical {sweeps_equal} ({} cells)",
            a.cells.len()
        ),
    );
}

fn bench_graph_is_row_stochastic() {
    let g = normalize_in_weights(&random_strongly_connected(
        N_BENCH,
        BENCH_EDGE_PROB,
        BENCH_GRAPH_SEED,
    ))
    .unwrap();
    let r = perron(g.weights(), &PerronOptions::default()).unwrap();
    verdict(
        "AC0",
        "benchmark graph has unit spectral radius after normalization",
        (r.rho - 1.0).abs() < 1e-12,
        format!("rho = {}", r.rho),
    );
}

fn main() {
    let criteria: [fn(); 10] = [
        bench_graph_is_row_stochastic,
        ac1_disease_free_from_low_infection,
        ac2_endemic_from_below,
        ac3_endemic_from_above_and_mixed,
        ac4_invariance_of_unit_cube,
        ac5_equilibrium_matches_simulation,
        ac6_spectral_certificates,
        ac7_lyapunov_monotone,
        ac8_contraction_rate_bounds,
        ac9_determinism,
    ];
    let failed = criteria
        .iter()
        .filter(|c| std::panic::catch_unwind(**c).is_err())
        .count();
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
