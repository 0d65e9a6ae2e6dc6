//! Perron–Frobenius computations for irreducible nonnegative matrices and
//! the epidemic-threshold classification.
//!
//! Power iteration runs on the shifted matrix `M + εI`. For irreducible `M`
//! the shift makes the matrix primitive, so the iteration converges even
//! when `M` itself is periodic (a directed cycle, for example). The shift
//! leaves the eigenvectors unchanged and moves the spectral radius by `ε`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphio::scc_components;
use crate::matrix::{diff_inf, norm_inf, Matrix};
use crate::model::SisModel;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 100_000;
pub const DEFAULT_SHIFT: f64 = 1.0;
/// Half-width of the band around `ρ = 1` inside which the regime is
/// reported as disease-free with a boundary warning.
pub const REGIME_BAND: f64 = 1e-9;
/// Relative tolerance of the componentwise comparisons in
/// [`collatz_wielandt_compare`].
pub const COMPARE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("matrix is not irreducible")]
    NotIrreducible,
    #[error("matrix has a negative entry")]
    NegativeEntry,
    #[error("power iteration did not converge in {} iterations (rho ~ {})", .best.iterations, .best.rho)]
    MaxIterationsExceeded { best: Box<SpectralReport> },
    #[error("comparison vector must be strictly positive")]
    NonPositiveVector,
    #[error("dimension mismatch: matrix is {expected}x{expected}, vector has {got} entries")]
    DimensionMismatch { expected: usize, got: usize },
}

impl SpectralError {
    pub fn code(&self) -> &'static str {
        match self {
            SpectralError::NotIrreducible => "NotIrreducible",
            SpectralError::NegativeEntry => "NegativeEntry",
            SpectralError::MaxIterationsExceeded { .. } => "MaxIterationsExceeded",
            SpectralError::NonPositiveVector => "NonPositiveVector",
            SpectralError::DimensionMismatch { .. } => "DimensionMismatch",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerronOptions {
    /// Bound on both the change of the eigenvalue estimate and the
    /// ∞-norm change of the normalized iterate between two iterations.
    pub tol: f64,
    pub max_iter: usize,
    pub shift: f64,
}

impl Default for PerronOptions {
    fn default() -> Self {
        PerronOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            shift: DEFAULT_SHIFT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub rho: f64,
    /// Right Perron vector, `‖·‖₁ = 1`.
    pub right_vec: Vec<f64>,
    /// Left Perron vector, `‖·‖₁ = 1`.
    pub left_vec: Vec<f64>,
    pub iterations: usize,
    pub left_iterations: usize,
    /// `‖M r - ρ r‖_∞`
    pub residual: f64,
    /// `‖lᵀ M - ρ lᵀ‖_∞`
    pub left_residual: f64,
}

struct PowerResult {
    vec: Vec<f64>,
    iterations: usize,
    converged: bool,
}

/// Extra iterations allowed without the vector change improving, once the
/// tolerance test has passed.
const POLISH_PATIENCE: usize = 20;

fn power_iterate(m: &Matrix, opts: &PerronOptions) -> PowerResult {
    let n = m.dim();
    let mut v = vec![1.0 / n as f64; n];
    let mut lambda_prev = f64::NAN;
    let mut converged = false;
    let mut best_change = f64::INFINITY;
    let mut stalled = 0;
    for it in 1..=opts.max_iter {
        let mut w = m.mul_vec(&v);
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi += opts.shift * vi;
        }
        let lambda: f64 = w.iter().sum();
        for wi in &mut w {
            *wi /= lambda;
        }
        let change = diff_inf(&w, &v);
        v = w;
        if !converged {
            converged = (lambda - lambda_prev).abs() < opts.tol && change < opts.tol;
            best_change = change;
        } else if change < best_change {
            best_change = change;
            stalled = 0;
        } else {
            stalled += 1;
        }
        // A small step can still leave an error of `change / (1 - ratio)`
        // when the spectral gap is small, so polish until progress stops.
        if converged && (change == 0.0 || stalled >= POLISH_PATIENCE) {
            return PowerResult {
                vec: v,
                iterations: it,
                converged: true,
            };
        }
        lambda_prev = lambda;
    }
    PowerResult {
        vec: v,
        iterations: opts.max_iter,
        converged,
    }
}

pub fn is_irreducible(m: &Matrix) -> bool {
    scc_components(&m.pattern_successors()).len() == 1
}

/// Spectral radius with normalized left and right Perron vectors.
pub fn perron(m: &Matrix, opts: &PerronOptions) -> Result<SpectralReport, SpectralError> {
    if !m.is_nonnegative() {
        return Err(SpectralError::NegativeEntry);
    }
    if !is_irreducible(m) {
        return Err(SpectralError::NotIrreducible);
    }
    let right = power_iterate(m, opts);
    let left = power_iterate(&m.transpose(), opts);

    let mr = m.mul_vec(&right.vec);
    // Rayleigh-type estimate with ‖r‖₁ = 1; avoids subtracting the shift.
    let rho: f64 = mr.iter().sum();
    let residual = norm_inf(
        &mr.iter()
            .zip(&right.vec)
            .map(|(a, r)| a - rho * r)
            .collect::<Vec<_>>(),
    );
    let lm = m.vec_mul(&left.vec);
    let left_residual = norm_inf(
        &lm.iter()
            .zip(&left.vec)
            .map(|(a, l)| a - rho * l)
            .collect::<Vec<_>>(),
    );
    let report = SpectralReport {
        rho,
        right_vec: right.vec,
        left_vec: left.vec,
        iterations: right.iterations,
        left_iterations: left.iterations,
        residual,
        left_residual,
    };
    if right.converged && left.converged {
        Ok(report)
    } else {
        Err(SpectralError::MaxIterationsExceeded {
            best: Box::new(report),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    DiseaseFreeOnly,
    EndemicExists,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeLabel {
    pub regime: Regime,
    /// `ρ(I - hD + hB)`
    pub rho_threshold: f64,
    pub boundary_warning: bool,
}

pub fn regime_for_rho(rho: f64) -> RegimeLabel {
    RegimeLabel {
        regime: if rho > 1.0 + REGIME_BAND {
            Regime::EndemicExists
        } else {
            Regime::DiseaseFreeOnly
        },
        rho_threshold: rho,
        boundary_warning: (rho - 1.0).abs() < REGIME_BAND,
    }
}

pub fn classify_regime(model: &SisModel) -> Result<RegimeLabel, SpectralError> {
    let report = perron(&model.threshold_matrix(), &PerronOptions::default())?;
    Ok(regime_for_rho(report.rho))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CwVerdict {
    MuBelowRho,
    MuAboveRho,
    MuEqualsRho,
    Inconclusive,
}

/// Orders `mu` against `ρ(M)` by comparing `μx` with `Mx` componentwise for
/// a strictly positive `x`.
pub fn collatz_wielandt_compare(
    m: &Matrix,
    x: &[f64],
    mu: f64,
) -> Result<CwVerdict, SpectralError> {
    if x.len() != m.dim() {
        return Err(SpectralError::DimensionMismatch {
            expected: m.dim(),
            got: x.len(),
        });
    }
    if !x.iter().all(|&v| v > 0.0 && v.is_finite()) {
        return Err(SpectralError::NonPositiveVector);
    }
    let mx = m.mul_vec(x);
    let (mut below, mut above, mut equal) = (0, 0, 0);
    for (&mxi, &xi) in mx.iter().zip(x) {
        let scaled = mu * xi;
        let tol = COMPARE_TOL * mxi.abs().max(scaled.abs()).max(f64::MIN_POSITIVE);
        let d = mxi - scaled;
        if d > tol {
            below += 1;
        } else if d < -tol {
            above += 1;
        } else {
            equal += 1;
        }
    }
    let n = x.len();
    Ok(if below == n {
        CwVerdict::MuBelowRho
    } else if above == n {
        CwVerdict::MuAboveRho
    } else if equal == n {
        CwVerdict::MuEqualsRho
    } else {
        CwVerdict::Inconclusive
    })
}
