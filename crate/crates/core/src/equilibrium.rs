//! Endemic equilibrium by monotone fixed-point iteration, with the residual
//! of the steady-state equation and the a-priori / certified bounds.
//!
//! At an equilibrium `(1 - x_i) Σ_j β_ij x_j = δ_i x_i`, which rearranges to
//! the fixed-point map
//!
//! ```text
//! T(x)_i = s_i / (δ_i + s_i),   s_i = Σ_j β_ij x_j.
//! ```
//!
//! `T` is monotone nondecreasing, so iterating from the all-ones vector gives
//! a componentwise nonincreasing sequence that converges to the largest fixed
//! point. In the endemic regime that is the endemic equilibrium `x*`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{diff_inf, norm_inf};
use crate::model::SisModel;
use crate::spectral::{classify_regime, Regime, SpectralError};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 1_000_000;
/// Absolute slack used when checking `lo ≤ x* ≤ hi`.
pub const BOUND_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EquilibriumError {
    #[error("no endemic equilibrium: rho(I - hD + hB) = {rho_threshold} <= 1")]
    RegimeMismatch { rho_threshold: f64 },
    #[error("fixed-point iteration did not converge in {iterations} iterations (last change {last_change})")]
    NoConvergence { iterations: usize, last_change: f64 },
    #[error("node {node} has zero curing rate; its endemic component is pinned to 1")]
    DegenerateDelta { node: usize },
    #[error("node {node}: x* = {value} outside bounds [{lo}, {hi}]")]
    BoundViolation {
        node: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

impl EquilibriumError {
    pub fn code(&self) -> &'static str {
        match self {
            EquilibriumError::RegimeMismatch { .. } => "RegimeMismatch",
            EquilibriumError::NoConvergence { .. } => "NoConvergence",
            EquilibriumError::DegenerateDelta { .. } => "DegenerateDelta",
            EquilibriumError::BoundViolation { .. } => "BoundViolation",
            EquilibriumError::Spectral(e) => e.code(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Reject nodes with `δ_i = 0` instead of pinning their component to 1.
    pub strict: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            strict: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    /// `1 - δ_i / (δ_i + Σ_j β_ij)`
    pub hi: Vec<f64>,
    /// `1 - δ_m / Σ_j β_mj` with `m = argmin x*`; may be negative.
    pub lo_certified: f64,
    /// `min_i (1 - δ_i / Σ_j β_ij)`
    pub lo_apriori: f64,
    pub m_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumReport {
    pub x_star: Vec<f64>,
    pub residual_inf: f64,
    pub iterations: usize,
    pub bounds: Bounds,
    /// Every iterate was componentwise no larger than its predecessor.
    pub monotone: bool,
    /// Nodes whose component was pinned to 1 in permissive mode.
    pub pinned_nodes: Vec<usize>,
}

/// `r_i = (1 - x_i) Σ_j β_ij x_j - δ_i x_i`; one step moves the state by `h r`.
pub fn residual(model: &SisModel, x: &[f64]) -> Vec<f64> {
    let s = model.pressure(x);
    x.iter()
        .zip(&s)
        .zip(model.delta())
        .map(|((&xi, &si), &di)| (1.0 - xi) * si - di * xi)
        .collect()
}

fn fixed_point_map(model: &SisModel, x: &[f64]) -> Vec<f64> {
    model
        .pressure(x)
        .iter()
        .zip(model.delta())
        .map(|(&s, &d)| s / (d + s))
        .collect()
}

const POLISH_PATIENCE: usize = 20;

pub fn solve_endemic(
    model: &SisModel,
    opts: &SolveOptions,
) -> Result<EquilibriumReport, EquilibriumError> {
    let label = classify_regime(model)?;
    if label.regime != Regime::EndemicExists {
        return Err(EquilibriumError::RegimeMismatch {
            rho_threshold: label.rho_threshold,
        });
    }
    let pinned_nodes: Vec<usize> = (0..model.n())
        .filter(|&i| model.delta()[i] == 0.0)
        .collect();
    if opts.strict {
        if let Some(&node) = pinned_nodes.first() {
            return Err(EquilibriumError::DegenerateDelta { node });
        }
    }

    let mut x = vec![1.0; model.n()];
    let mut monotone = true;
    let mut last_change = f64::INFINITY;
    let mut iterations = 0;
    while last_change >= opts.tol {
        if iterations == opts.max_iter {
            return Err(EquilibriumError::NoConvergence {
                iterations,
                last_change,
            });
        }
        let next = fixed_point_map(model, &x);
        monotone &= next.iter().zip(&x).all(|(a, b)| a <= b);
        last_change = diff_inf(&next, &x);
        x = next;
        iterations += 1;
    }
    // A change below `tol` can still leave an error of `tol / (1 - rate)`;
    // keep iterating until the iterates stop improving.
    let mut stalled = 0;
    while last_change > 0.0 && stalled < POLISH_PATIENCE && iterations < opts.max_iter {
        let next = fixed_point_map(model, &x);
        let change = diff_inf(&next, &x);
        if change < last_change {
            stalled = 0;
        } else {
            stalled += 1;
        }
        last_change = change;
        x = next;
        iterations += 1;
    }
    let residual_inf = norm_inf(&residual(model, &x));
    let bounds = bounds(model, &x)?;
    Ok(EquilibriumReport {
        x_star: x,
        residual_inf,
        iterations,
        bounds,
        monotone,
        pinned_nodes,
    })
}

/// Evaluates the equilibrium bounds at `x_star` and checks
/// `lo_certified ≤ x_i* ≤ hi_i` for every node.
pub fn bounds(model: &SisModel, x_star: &[f64]) -> Result<Bounds, EquilibriumError> {
    let rows = model.infection_row_sums();
    let delta = model.delta();
    let hi: Vec<f64> = rows
        .iter()
        .zip(delta)
        .map(|(&s, &d)| 1.0 - d / (d + s))
        .collect();
    let mut m_index = 0;
    for (i, &v) in x_star.iter().enumerate() {
        if v < x_star[m_index] {
            m_index = i;
        }
    }
    let lo_certified = 1.0 - delta[m_index] / rows[m_index];
    let lo_apriori = rows
        .iter()
        .zip(delta)
        .map(|(&s, &d)| 1.0 - d / s)
        .fold(f64::INFINITY, f64::min);
    for (node, (&value, &h)) in x_star.iter().zip(&hi).enumerate() {
        if value < lo_certified - BOUND_TOL || value > h + BOUND_TOL {
            return Err(EquilibriumError::BoundViolation {
                node,
                value,
                lo: lo_certified,
                hi: h,
            });
        }
    }
    Ok(Bounds {
        hi,
        lo_certified,
        lo_apriori,
        m_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphio::{normalize_in_weights, parse_edge_list, random_strongly_connected};
    use crate::model::{build_and_validate, sample_params, SisParams};

    fn cycle_model(beta: f64, delta: f64) -> SisModel {
        let g = normalize_in_weights(&parse_edge_list("0 1\n1 0").unwrap()).unwrap();
        build_and_validate(&g, &SisParams::homogeneous(2, beta, delta, 1.0))
            .unwrap()
            .0
    }

    /// Long-run simulation from `0.5 · 1`, the oracle for the solver.
    fn simulated_equilibrium(model: &SisModel, steps: usize) -> Vec<f64> {
        let mut x = vec![0.5; model.n()];
        for _ in 0..steps {
            let next = model.step(&x).unwrap();
            if next == x {
                break;
            }
            x = next;
        }
        x
    }

    #[test]
    fn homogeneous_cycle() {
        let r = solve_endemic(&cycle_model(0.5, 0.25), &SolveOptions::default()).unwrap();
        for v in &r.x_star {
            assert!((v - 0.5).abs() < 1e-11);
        }
        assert!(r.residual_inf < 1e-12);
        assert!(r.monotone);
        // hi = 1 - 0.25 / 0.75; lo_certified = 1 - 0.25 / 0.5
        for h in &r.bounds.hi {
            assert!((h - 2.0 / 3.0).abs() < 1e-15);
        }
        assert_eq!(r.bounds.lo_certified, 0.5);
        assert_eq!(r.bounds.lo_apriori, 0.5);
        assert!(r.bounds.m_index < 2);
    }

    #[test]
    fn single_self_loop() {
        let g = parse_edge_list("0 0").unwrap();
        let (m, _) = build_and_validate(&g, &SisParams::homogeneous(1, 0.5, 0.25, 1.0)).unwrap();
        let r = solve_endemic(&m, &SolveOptions::default()).unwrap();
        assert!((r.x_star[0] - 0.5).abs() < 1e-11);
    }

    #[test]
    fn residual_examples() {
        let m = cycle_model(0.5, 0.25);
        assert_eq!(residual(&m, &[0.0, 0.0]), vec![0.0, 0.0]);
        let r = residual(&m, &[0.2, 0.1]);
        assert!((r[0] + 0.01).abs() < 1e-15);
        assert!((r[1] - 0.065).abs() < 1e-15);
    }

    #[test]
    fn disease_free_regime_is_refused() {
        assert!(matches!(
            solve_endemic(&cycle_model(0.2, 0.3), &SolveOptions::default()),
            Err(EquilibriumError::RegimeMismatch { .. })
        ));
    }

    #[test]
    fn zero_delta_strict_and_permissive() {
        let g = normalize_in_weights(&parse_edge_list("0 1\n1 0").unwrap()).unwrap();
        let p = SisParams {
            beta: vec![0.5, 0.5],
            delta: vec![0.25, 0.0],
            h: 1.0,
        };
        let (m, _) = build_and_validate(&g, &p).unwrap();
        assert_eq!(
            solve_endemic(&m, &SolveOptions::default()),
            Err(EquilibriumError::DegenerateDelta { node: 1 })
        );
        let r = solve_endemic(
            &m,
            &SolveOptions {
                strict: false,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.x_star[1], 1.0);
        assert_eq!(r.pinned_nodes, vec![1]);
        assert!(r.residual_inf < 1e-12);
    }

    #[test]
    fn iteration_cap() {
        let opts = SolveOptions {
            max_iter: 1,
            ..Default::default()
        };
        assert!(matches!(
            solve_endemic(&cycle_model(0.5, 0.25), &opts),
            Err(EquilibriumError::NoConvergence { iterations: 1, .. })
        ));
    }

    #[test]
    fn bound_violation_detected() {
        let m = cycle_model(0.5, 0.25);
        assert!(matches!(
            bounds(&m, &[0.9, 0.5]),
            Err(EquilibriumError::BoundViolation { node: 0, .. })
        ));
    }

    #[test]
    fn heterogeneous_models_match_simulation() {
        for (n, seed) in [(3usize, 5u64), (5, 6), (12, 7), (30, 8)] {
            let g = normalize_in_weights(&random_strongly_connected(n, 0.3, seed)).unwrap();
            let p = sample_params((0.45, 0.55), (0.25, 0.35), 1.0, n, seed).unwrap();
            let (m, _) = build_and_validate(&g, &p).unwrap();
            let r = solve_endemic(&m, &SolveOptions::default()).unwrap();
            let sim = simulated_equilibrium(&m, 100_000);
            assert!(diff_inf(&r.x_star, &sim) < 1e-8, "n={n}");
            assert!(r.monotone);
            assert!(r.x_star.iter().all(|&v| v > 0.0));
            let b = &r.bounds;
            assert!(b.lo_apriori <= b.lo_certified);
            for (i, &v) in r.x_star.iter().enumerate() {
                assert!(b.lo_certified <= v + 1e-12 && v <= b.hi[i]);
                // (Bx*)_i = δ_i x*_i / (1 - x*_i)
                let s = m.pressure(&r.x_star)[i];
                assert!((s - m.delta()[i] * v / (1.0 - v)).abs() < 1e-10);
            }
        }
    }
}
