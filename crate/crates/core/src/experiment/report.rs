use serde::{Deserialize, Serialize};

use crate::equilibrium::Bounds;
use crate::model::StopReason;
use crate::spectral::Regime;
use crate::stability::{ConvergedTo, InitialClass};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorEntry {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OvershootCounts {
    pub up: usize,
    pub down: usize,
}

/// Report JSON. Fields a run could not reach are `null`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub fingerprint: Option<String>,
    pub n: Option<usize>,
    /// External ids of the nodes that were kept.
    pub node_labels: Option<Vec<u64>>,
    /// Largest `h (δ_i + Σ_j β_ij)`.
    pub assumption_worst: Option<f64>,
    pub rho_threshold: Option<f64>,
    pub regime: Option<Regime>,
    pub boundary_warning: Option<bool>,
    pub x_star: Option<Vec<f64>>,
    pub equilibrium_residual: Option<f64>,
    pub bounds: Option<Bounds>,
    pub rho_xi: Option<f64>,
    pub f_mu_residual: Option<f64>,
    pub initial_class: Option<InitialClass>,
    pub overshoot: Option<OvershootCounts>,
    /// `true`/`false` for the ordered initial classes, `null` otherwise.
    pub overshoot_verdict: Option<bool>,
    pub hitting_time: Option<usize>,
    pub lyapunov_monotone: Option<bool>,
    pub lyapunov_max_identity_error: Option<f64>,
    pub empirical_rate: Option<f64>,
    pub converged_to: Option<ConvergedTo>,
    pub final_error_inf: Option<f64>,
    pub steps: Option<usize>,
    pub steps_to_tolerance: Option<usize>,
    pub stop_reason: Option<StopReason>,
    pub warnings: Vec<String>,
    pub errors: Vec<ErrorEntry>,
}

impl Report {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
