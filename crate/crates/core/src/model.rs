//! SIS parameters, assumption checks and the discrete-time dynamics
//!
//! ```text
//! x_i(k+1) = x_i(k) + h [ (1 - x_i(k)) Σ_j β_ij x_j(k) - δ_i x_i(k) ],   β_ij = β_i a_ij
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::graphio::{is_strongly_connected, Graph};
use crate::matrix::{diff_inf, Matrix};

/// Tolerance on the `[0, 1]` state range accepted by [`SisModel::step`].
pub const STATE_RANGE_TOL: f64 = 1e-15;
/// Assumption-3 values this close to 1 are accepted but flagged.
pub const ASSUMPTION_BOUNDARY_BAND: f64 = 1e-12;
pub const DEFAULT_STOP_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("graph is not strongly connected")]
    NotStronglyConnected,
    #[error("node {node}: need beta > 0 and delta >= 0 (beta = {beta}, delta = {delta})")]
    AssumptionTwoViolated { node: usize, beta: f64, delta: f64 },
    #[error("node {node}: h (delta + sum_j beta_ij) = {value} exceeds 1")]
    AssumptionThreeViolated { node: usize, value: f64 },
    #[error("sampling period must be positive and finite, got {0}")]
    InvalidSamplingPeriod(f64),
    #[error("expected {expected} entries, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("state component {node} = {value} is outside [0, 1]")]
    StateOutOfRange { node: usize, value: f64 },
    #[error("invalid sampling interval ({lo}, {hi})")]
    InvalidInterval { lo: f64, hi: f64 },
}

impl ModelError {
    pub fn code(&self) -> &'static str {
        match self {
            ModelError::NotStronglyConnected => "NotStronglyConnected",
            ModelError::AssumptionTwoViolated { .. } => "AssumptionTwoViolated",
            ModelError::AssumptionThreeViolated { .. } => "AssumptionThreeViolated",
            ModelError::InvalidSamplingPeriod(_) => "InvalidSamplingPeriod",
            ModelError::DimensionMismatch { .. } => "DimensionMismatch",
            ModelError::StateOutOfRange { .. } => "StateOutOfRange",
            ModelError::InvalidInterval { .. } => "InvalidInterval",
        }
    }
}

/// Per-node infection rates `beta`, curing rates `delta` and the sampling
/// period `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SisParams {
    pub beta: Vec<f64>,
    pub delta: Vec<f64>,
    pub h: f64,
}

impl SisParams {
    pub fn homogeneous(n: usize, beta: f64, delta: f64, h: f64) -> Self {
        SisParams {
            beta: vec![beta; n],
            delta: vec![delta; n],
            h,
        }
    }
}

/// Per-node values of `h (δ_i + Σ_j β_ij)` and the worst offender.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub values: Vec<f64>,
    pub worst_node: usize,
    pub worst_value: f64,
    /// Worst value lies within [`ASSUMPTION_BOUNDARY_BAND`] of 1.
    pub near_boundary: bool,
    /// Nodes with `δ_i = 0`. The endemic component there is pinned to 1 and
    /// the error-system diagnostics are unavailable.
    pub zero_delta_nodes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SisModel {
    graph: Graph,
    params: SisParams,
    b: Matrix,
    b_rows: Vec<Vec<(usize, f64)>>,
    b_row_sums: Vec<f64>,
    fingerprint: String,
}

/// Builds `B = [β_i a_ij]` and checks strong connectivity plus Assumptions
/// 2 and 3.
pub fn build_and_validate(
    graph: &Graph,
    params: &SisParams,
) -> Result<(SisModel, AssumptionReport), ModelError> {
    let n = graph.n();
    for len in [params.beta.len(), params.delta.len()] {
        if len != n {
            return Err(ModelError::DimensionMismatch {
                expected: n,
                got: len,
            });
        }
    }
    if !(params.h > 0.0 && params.h.is_finite()) {
        return Err(ModelError::InvalidSamplingPeriod(params.h));
    }
    if !is_strongly_connected(graph) {
        return Err(ModelError::NotStronglyConnected);
    }
    for (node, (&beta, &delta)) in params.beta.iter().zip(&params.delta).enumerate() {
        if !(beta > 0.0 && beta.is_finite() && delta >= 0.0 && delta.is_finite()) {
            return Err(ModelError::AssumptionTwoViolated { node, beta, delta });
        }
    }

    let mut b = graph.weights().clone();
    for i in 0..n {
        let beta = params.beta[i];
        for w in b.row_mut(i) {
            *w *= beta;
        }
    }
    let b_row_sums = b.row_sums();
    let values: Vec<f64> = (0..n)
        .map(|i| params.h * (params.delta[i] + b_row_sums[i]))
        .collect();
    let mut worst_node = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[worst_node] {
            worst_node = i;
        }
    }
    let worst_value = values[worst_node];
    if worst_value > 1.0 {
        return Err(ModelError::AssumptionThreeViolated {
            node: worst_node,
            value: worst_value,
        });
    }
    let report = AssumptionReport {
        near_boundary: 1.0 - worst_value < ASSUMPTION_BOUNDARY_BAND,
        zero_delta_nodes: (0..n).filter(|&i| params.delta[i] == 0.0).collect(),
        values,
        worst_node,
        worst_value,
    };

    let b_rows = (0..n)
        .map(|i| {
            b.row(i)
                .iter()
                .enumerate()
                .filter(|(_, &w)| w != 0.0)
                .map(|(j, &w)| (j, w))
                .collect()
        })
        .collect();
    let fingerprint = fingerprint(graph, params);
    let model = SisModel {
        graph: graph.clone(),
        params: params.clone(),
        b,
        b_rows,
        b_row_sums,
        fingerprint,
    };
    Ok((model, report))
}

fn fingerprint(graph: &Graph, params: &SisParams) -> String {
    let mut hasher = Sha256::new();
    hasher.update(graph.to_edge_list().as_bytes());
    for (tag, values) in [("beta", &params.beta), ("delta", &params.delta)] {
        hasher.update(tag.as_bytes());
        for v in values {
            hasher.update(format!(" {v:.16e}").as_bytes());
        }
    }
    hasher.update(format!("h {:.16e}", params.h).as_bytes());
    hex::encode(hasher.finalize())
}

impl SisModel {
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn params(&self) -> &SisParams {
        &self.params
    }

    pub fn h(&self) -> f64 {
        self.params.h
    }

    pub fn delta(&self) -> &[f64] {
        &self.params.delta
    }

    /// `B = [β_i a_ij]`.
    pub fn infection_matrix(&self) -> &Matrix {
        &self.b
    }

    /// `Σ_j β_ij` per node.
    pub fn infection_row_sums(&self) -> &[f64] {
        &self.b_row_sums
    }

    /// SHA-256 over the serialized graph and parameters.
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    /// `I - hD + hB`, whose spectral radius decides the regime.
    pub fn threshold_matrix(&self) -> Matrix {
        let h = self.h();
        let n = self.n();
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = h * self.b[(i, j)];
            }
            m[(i, i)] += 1.0 - h * self.params.delta[i];
        }
        m
    }

    /// Infection pressure `(Bx)_i = Σ_j β_ij x_j`. Skipping zero entries
    /// gives the same floating-point value as the dense dot product.
    pub fn pressure(&self, x: &[f64]) -> Vec<f64> {
        self.b_rows
            .iter()
            .map(|row| row.iter().map(|&(j, w)| w * x[j]).sum())
            .collect()
    }

    pub fn check_state(&self, x: &[f64]) -> Result<(), ModelError> {
        if x.len() != self.n() {
            return Err(ModelError::DimensionMismatch {
                expected: self.n(),
                got: x.len(),
            });
        }
        for (node, &value) in x.iter().enumerate() {
            if !(value >= -STATE_RANGE_TOL && value <= 1.0 + STATE_RANGE_TOL) {
                return Err(ModelError::StateOutOfRange { node, value });
            }
        }
        Ok(())
    }

    /// One step of the dynamics. Evaluated as
    /// `x_i (1 - hδ_i) + h (1 - x_i) (Bx)_i`, a sum of two nonnegative terms.
    pub fn step(&self, x: &[f64]) -> Result<Vec<f64>, ModelError> {
        self.check_state(x)?;
        Ok(self.step_unchecked(x))
    }

    pub(crate) fn step_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let h = self.h();
        let s = self.pressure(x);
        let next: Vec<f64> = x
            .iter()
            .zip(&s)
            .zip(&self.params.delta)
            .map(|((&xi, &si), &di)| xi * (1.0 - h * di) + h * (1.0 - xi) * si)
            .collect();
        debug_assert!(
            next.iter()
                .all(|&v| (-STATE_RANGE_TOL..=1.0 + STATE_RANGE_TOL).contains(&v)),
            "state left [0, 1]: {next:?}"
        );
        next
    }

    /// Iterates [`step`](Self::step) from `x0` for at most `horizon` steps,
    /// stopping early once `‖x(k+1) - x(k)‖_∞ < stop_tol` (`0` disables).
    pub fn simulate(
        &self,
        x0: &[f64],
        horizon: usize,
        stop_tol: f64,
    ) -> Result<Trajectory, ModelError> {
        self.check_state(x0)?;
        let mut states = Vec::with_capacity(horizon.min(1 << 16) + 1);
        states.push(x0.to_vec());
        let mut stop_reason = StopReason::Horizon;
        for _ in 0..horizon {
            let cur = states.last().expect("trajectory is never empty");
            let next = self.step(cur)?;
            let change = diff_inf(&next, cur);
            states.push(next);
            if change < stop_tol {
                stop_reason = StopReason::Converged {
                    tolerance: stop_tol,
                };
                break;
            }
        }
        Ok(Trajectory {
            states,
            stop_reason,
            fingerprint: self.fingerprint.clone(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum StopReason {
    Horizon,
    Converged { tolerance: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<Vec<f64>>,
    pub stop_reason: StopReason,
    pub fingerprint: String,
}

impl Trajectory {
    /// Number of steps taken, `states.len() - 1`.
    pub fn steps(&self) -> usize {
        self.states.len() - 1
    }

    pub fn initial(&self) -> &[f64] {
        &self.states[0]
    }

    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectory is never empty")
    }
}

fn sample_open(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    loop {
        let v = rng.gen_range(lo..hi);
        if v > lo {
            return v;
        }
    }
}

fn check_interval(lo: f64, hi: f64) -> Result<(), ModelError> {
    if lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo < hi {
        Ok(())
    } else {
        Err(ModelError::InvalidInterval { lo, hi })
    }
}

/// Draws `β_i` then `δ_i` uniformly from the open intervals with a ChaCha8
/// generator seeded by `seed`.
pub fn sample_params(
    beta_interval: (f64, f64),
    delta_interval: (f64, f64),
    h: f64,
    n: usize,
    seed: u64,
) -> Result<SisParams, ModelError> {
    check_interval(beta_interval.0, beta_interval.1)?;
    check_interval(delta_interval.0, delta_interval.1)?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(ModelError::InvalidSamplingPeriod(h));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let beta = (0..n)
        .map(|_| sample_open(&mut rng, beta_interval.0, beta_interval.1))
        .collect();
    let delta = (0..n)
        .map(|_| sample_open(&mut rng, delta_interval.0, delta_interval.1))
        .collect();
    Ok(SisParams { beta, delta, h })
}
