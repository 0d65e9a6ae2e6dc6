//! Error-system matrices around the endemic equilibrium and trajectory
//! diagnostics.
//!
//! With `c_i = hδ_i / (1 - x_i*)` the crate builds
//!
//! ```text
//! Ξ    = I - diag(c) + h diag(1 - x*) B      comparison matrix of the error z = x - x*
//! F    = I - diag(c) + h B                   ρ(F) = 1 with right eigenvector μ = x* / x*_0
//! Φ(k) = I - diag(c) + h diag(1 - x(k)) B    exact error propagator, z(k+1) = Φ(k) z(k)
//! ```
//!
//! and the Lyapunov function `V(k) = vᵀ y(k)`, where `v` is the left Perron
//! vector of `F` and `y(k+1) = Φ(k) y(k)` starts from `|z(s)|` at the first
//! step `s` where every component of the state is positive. Along that
//! auxiliary system `V(k+1) - V(k) = -h vᵀ diag(x(k)) B y(k) ≤ 0`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equilibrium::EquilibriumReport;
use crate::matrix::{diff_inf, dot, norm_inf, Matrix};
use crate::model::{SisModel, Trajectory};
use crate::spectral::{collatz_wielandt_compare, perron, CwVerdict, PerronOptions, SpectralError};

pub const DEFAULT_OVERSHOOT_SLACK: f64 = 1e-12;
pub const DEFAULT_CONVERGE_TOL: f64 = 1e-6;
/// Allowed increase of `V` between two steps.
pub const LYAPUNOV_SLACK: f64 = 1e-12;
/// Strict decrease of `V` is only demanded while `‖y‖_∞` exceeds this.
pub const LYAPUNOV_STRICT_FLOOR: f64 = 1e-10;
/// Errors below this are treated as round-off by [`convergence_rate`].
pub const RATE_FLOOR: f64 = 100.0 * f64::EPSILON;
/// Tolerance on `‖Fμ - μ‖_∞` and `|ρ(F) - 1|`.
pub const F_CERT_TOL: f64 = 1e-8;
/// Negative entries of Ξ or F above this magnitude are attributed to
/// round-off and set to zero; anything larger is a bad equilibrium.
const NONNEG_ROUNDING: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StabilityError {
    #[error("node {node}: zero curing rate or x*_i = 1 leaves the error system undefined")]
    DegenerateDelta { node: usize },
    #[error("{matrix}[{row}][{col}] = {value} is negative")]
    NonNegativityViolation {
        matrix: &'static str,
        row: usize,
        col: usize,
        value: f64,
    },
    #[error("spectral certificate failed: {0}")]
    SpectralCertificateFailed(String),
    #[error("trajectory never reaches a strictly positive state")]
    NoPositiveState,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

impl StabilityError {
    pub fn code(&self) -> &'static str {
        match self {
            StabilityError::DegenerateDelta { .. } => "DegenerateDelta",
            StabilityError::NonNegativityViolation { .. } => "NonNegativityViolation",
            StabilityError::SpectralCertificateFailed(_) => "SpectralCertificateFailed",
            StabilityError::NoPositiveState => "NoPositiveState",
            StabilityError::DimensionMismatch { .. } => "DimensionMismatch",
            StabilityError::Spectral(e) => e.code(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSystem {
    pub xi: Matrix,
    pub f: Matrix,
    /// `μ_i = x_i* / x_0*`
    pub mu: Vec<f64>,
    /// Left Perron vector of `F`, `‖v‖₁ = 1`.
    pub v: Vec<f64>,
    /// `1 - hδ_i / (1 - x_i*)`, the shared diagonal part of Ξ, F and Φ(k).
    pub diag: Vec<f64>,
    pub rho_xi: f64,
    pub rho_f: f64,
    pub f_mu_residual: f64,
    pub xi_x_star: CwVerdict,
}

fn check_nonnegative(m: &mut Matrix, name: &'static str) -> Result<(), StabilityError> {
    let n = m.dim();
    for i in 0..n {
        for j in 0..n {
            let value = m[(i, j)];
            if value < 0.0 {
                if value < -NONNEG_ROUNDING {
                    return Err(StabilityError::NonNegativityViolation {
                        matrix: name,
                        row: i,
                        col: j,
                        value,
                    });
                }
                m[(i, j)] = 0.0;
            }
        }
    }
    Ok(())
}

pub fn build_error_system(model: &SisModel, x_star: &[f64]) -> Result<ErrorSystem, StabilityError> {
    let n = model.n();
    if x_star.len() != n {
        return Err(StabilityError::DimensionMismatch {
            expected: n,
            got: x_star.len(),
        });
    }
    let h = model.h();
    let delta = model.delta();
    if let Some(node) = (0..n).find(|&i| delta[i] == 0.0 || !(x_star[i] < 1.0)) {
        return Err(StabilityError::DegenerateDelta { node });
    }
    if !x_star.iter().all(|&v| v > 0.0) {
        return Err(StabilityError::SpectralCertificateFailed(
            "equilibrium is not strictly positive".into(),
        ));
    }
    let b = model.infection_matrix();
    let diag: Vec<f64> = (0..n)
        .map(|i| 1.0 - h * delta[i] / (1.0 - x_star[i]))
        .collect();
    let mut xi = Matrix::zeros(n);
    let mut f = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            xi[(i, j)] = h * (1.0 - x_star[i]) * b[(i, j)];
            f[(i, j)] = h * b[(i, j)];
        }
        xi[(i, i)] += diag[i];
        f[(i, i)] += diag[i];
    }
    check_nonnegative(&mut xi, "Xi")?;
    check_nonnegative(&mut f, "F")?;

    let opts = PerronOptions::default();
    let xi_report = perron(&xi, &opts)?;
    let f_report = perron(&f, &opts)?;
    let mu: Vec<f64> = x_star.iter().map(|&v| v / x_star[0]).collect();
    let f_mu_residual = diff_inf(&f.mul_vec(&mu), &mu);
    let xi_x_star = collatz_wielandt_compare(&xi, x_star, 1.0)?;

    let es = ErrorSystem {
        mu,
        v: f_report.left_vec,
        diag,
        rho_xi: xi_report.rho,
        rho_f: f_report.rho,
        f_mu_residual,
        xi_x_star,
        xi,
        f,
    };
    if es.f_mu_residual >= F_CERT_TOL {
        return Err(StabilityError::SpectralCertificateFailed(format!(
            "|F mu - mu| = {}",
            es.f_mu_residual
        )));
    }
    if (es.rho_f - 1.0).abs() >= F_CERT_TOL {
        return Err(StabilityError::SpectralCertificateFailed(format!(
            "rho(F) = {}",
            es.rho_f
        )));
    }
    if !(es.rho_xi < 1.0) {
        return Err(StabilityError::SpectralCertificateFailed(format!(
            "rho(Xi) = {}",
            es.rho_xi
        )));
    }
    if es.xi_x_star != CwVerdict::MuAboveRho {
        return Err(StabilityError::SpectralCertificateFailed(format!(
            "Xi x* << x* does not hold ({:?})",
            es.xi_x_star
        )));
    }
    Ok(es)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitialClass {
    Zero,
    Dl,
    Dh,
    Mixed,
}

/// `Dl`: `x0 ≤ x*` componentwise and `x0 ≠ 0` (this includes `x0 = x*`).
/// `Dh`: `x0 ≥ x*` componentwise and `x0 ≠ x*`.
pub fn classify_initial(x0: &[f64], x_star: &[f64]) -> InitialClass {
    if x0.iter().all(|&v| v == 0.0) {
        return InitialClass::Zero;
    }
    let below = x0.iter().zip(x_star).all(|(a, b)| a <= b);
    let above = x0.iter().zip(x_star).all(|(a, b)| a >= b);
    if below {
        InitialClass::Dl
    } else if above {
        InitialClass::Dh
    } else {
        InitialClass::Mixed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OvershootReport {
    pub initial_class: InitialClass,
    /// `(k, i)` pairs with `x_i(k) > x_i* + slack`.
    pub up: usize,
    /// `(k, i)` pairs with `x_i(k) < x_i* - slack`.
    pub down: usize,
    /// `Some(pass)` for `Dl` (no up-crossings) and `Dh` (no down-crossings);
    /// `None` where no ordering is guaranteed.
    pub verdict: Option<bool>,
}

pub fn overshoot_check(traj: &Trajectory, x_star: &[f64], slack: f64) -> OvershootReport {
    let initial_class = classify_initial(traj.initial(), x_star);
    let (mut up, mut down) = (0, 0);
    for state in &traj.states {
        for (&x, &target) in state.iter().zip(x_star) {
            if x > target + slack {
                up += 1;
            } else if x < target - slack {
                down += 1;
            }
        }
    }
    let verdict = match initial_class {
        InitialClass::Dl => Some(up == 0),
        InitialClass::Dh => Some(down == 0),
        InitialClass::Zero | InitialClass::Mixed => None,
    };
    OvershootReport {
        initial_class,
        up,
        down,
        verdict,
    }
}

/// First step at which every component is strictly positive.
pub fn positivity_hitting_time(traj: &Trajectory) -> Option<usize> {
    traj.states.iter().position(|s| s.iter().all(|&v| v > 0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovTrace {
    /// Hitting time `s`; `values[0]` is `V(s)`.
    pub start: usize,
    pub values: Vec<f64>,
    /// `max_k |V(k+1) - V(k) + h vᵀ diag(x(k)) B y(k)|`
    pub max_identity_error: f64,
    /// `V(k+1) ≤ V(k) + LYAPUNOV_SLACK` at every step.
    pub monotone: bool,
    /// `V(k+1) < V(k)` whenever `‖y(k)‖_∞ > LYAPUNOV_STRICT_FLOOR`.
    pub strictly_decreasing: bool,
}

pub fn lyapunov_trace(
    model: &SisModel,
    x_star: &[f64],
    es: &ErrorSystem,
    traj: &Trajectory,
) -> Result<LyapunovTrace, StabilityError> {
    if let Some(node) = (0..model.n()).find(|&i| model.delta()[i] == 0.0) {
        return Err(StabilityError::DegenerateDelta { node });
    }
    let start = positivity_hitting_time(traj).ok_or(StabilityError::NoPositiveState)?;
    let h = model.h();
    let mut y: Vec<f64> = traj.states[start]
        .iter()
        .zip(x_star)
        .map(|(a, b)| (a - b).abs())
        .collect();
    let mut values = vec![dot(&es.v, &y)];
    let mut max_identity_error: f64 = 0.0;
    let mut monotone = true;
    let mut strictly_decreasing = true;

    for x in &traj.states[start..traj.states.len() - 1] {
        let by = model.pressure(&y);
        let predicted: f64 = -h
            * es.v
                .iter()
                .zip(x)
                .zip(&by)
                .map(|((&vi, &xi), &bi)| vi * xi * bi)
                .sum::<f64>();
        let next: Vec<f64> = (0..y.len())
            .map(|i| es.diag[i] * y[i] + (1.0 - x[i]) * h * by[i])
            .collect();
        let prev_v = *values.last().expect("non-empty");
        let next_v = dot(&es.v, &next);
        max_identity_error = max_identity_error.max(((next_v - prev_v) - predicted).abs());
        if next_v > prev_v + LYAPUNOV_SLACK {
            monotone = false;
        }
        if norm_inf(&y) > LYAPUNOV_STRICT_FLOOR && !(next_v < prev_v) {
            strictly_decreasing = false;
        }
        values.push(next_v);
        y = next;
    }
    Ok(LyapunovTrace {
        start,
        values,
        max_identity_error,
        monotone,
        strictly_decreasing,
    })
}

/// Geometric-mean per-step contraction of `‖x(k) - target‖_∞`.
///
/// The trajectory is cut at the first error below [`RATE_FLOOR`]; the rate
/// is measured over the second half of what remains. `None` when fewer than
/// two steps are available.
pub fn convergence_rate(traj: &Trajectory, target: &[f64]) -> Option<f64> {
    let errors: Vec<f64> = traj.states.iter().map(|s| diff_inf(s, target)).collect();
    let usable = errors
        .iter()
        .position(|&e| e < RATE_FLOOR)
        .unwrap_or(errors.len());
    let first = usable / 2;
    let steps = usable.checked_sub(1 + first)?;
    if steps < 2 {
        return None;
    }
    let last = first + steps;
    Some((errors[last] / errors[first]).powf(1.0 / steps as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConvergedTo {
    DiseaseFree,
    Endemic,
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticOptions {
    pub overshoot_slack: f64,
    pub converge_tol: f64,
}

impl Default for DiagnosticOptions {
    fn default() -> Self {
        DiagnosticOptions {
            overshoot_slack: DEFAULT_OVERSHOOT_SLACK,
            converge_tol: DEFAULT_CONVERGE_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// `None` without an endemic equilibrium to compare against.
    pub overshoot: Option<OvershootReport>,
    pub lyapunov: Option<LyapunovTrace>,
    pub hitting_time: Option<usize>,
    pub empirical_rate: Option<f64>,
    pub converged_to: ConvergedTo,
    /// Distance of the last state to `x*` (endemic) or to `0`.
    pub final_error_inf: f64,
    /// First `k` with the error below `converge_tol`.
    pub steps_to_tolerance: Option<usize>,
    pub notes: Vec<String>,
}

/// Runs every trajectory diagnostic that applies. `equilibrium` and
/// `error_system` are `None` in the disease-free regime or when the error
/// system could not be built.
pub fn diagnose(
    model: &SisModel,
    equilibrium: Option<&EquilibriumReport>,
    error_system: Option<&ErrorSystem>,
    traj: &Trajectory,
    opts: &DiagnosticOptions,
) -> StabilityReport {
    let mut notes = Vec::new();
    let zero = vec![0.0; model.n()];
    let target: &[f64] = equilibrium.map_or(&zero, |e| &e.x_star);

    let overshoot = equilibrium.map(|e| overshoot_check(traj, &e.x_star, opts.overshoot_slack));
    let lyapunov = match (equilibrium, error_system) {
        (Some(e), Some(es)) => match lyapunov_trace(model, &e.x_star, es, traj) {
            Ok(t) => Some(t),
            Err(err) => {
                notes.push(format!("stability.{}: {err}", err.code()));
                None
            }
        },
        _ => None,
    };
    let hitting_time = positivity_hitting_time(traj);
    let empirical_rate = convergence_rate(traj, target);

    let final_error_inf = diff_inf(traj.last(), target);
    let final_norm = norm_inf(traj.last());
    let converged_to = if equilibrium.is_some() && final_error_inf < opts.converge_tol {
        ConvergedTo::Endemic
    } else if final_norm < opts.converge_tol {
        ConvergedTo::DiseaseFree
    } else {
        ConvergedTo::Undecided
    };
    let final_target: &[f64] = match converged_to {
        ConvergedTo::DiseaseFree => &zero,
        _ => target,
    };
    let steps_to_tolerance = traj
        .states
        .iter()
        .position(|s| diff_inf(s, final_target) < opts.converge_tol);

    StabilityReport {
        overshoot,
        lyapunov,
        hitting_time,
        empirical_rate,
        converged_to,
        final_error_inf,
        steps_to_tolerance,
        notes,
    }
}
