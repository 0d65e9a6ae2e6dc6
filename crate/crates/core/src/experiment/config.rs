//! JSON experiment configuration.
//!
//! ```json
//! {
//!   "network": { "generate": { "n": 67, "extra_edge_prob": 0.05, "seed": 1 } },
//!   "normalize_in_weights": true,
//!   "params": { "sampled": { "beta_range": [0.45, 0.55], "delta_range": [0.25, 0.35], "seed": 7 } },
//!   "h": 1.0,
//!   "x0": { "uniform_range": { "lo": 0.0, "hi": 0.2, "seed": 3 } },
//!   "horizon": 5000,
//!   "output": { "trajectory_csv": "traj.csv", "report_json": "report.json" }
//! }
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::model::DEFAULT_STOP_TOL;
use crate::stability::{DEFAULT_CONVERGE_TOL, DEFAULT_OVERSHOOT_SLACK};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkSource {
    /// Edge-list file, `src dst [weight]` per line.
    EdgeList(PathBuf),
    Generate {
        n: usize,
        extra_edge_prob: f64,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamSource {
    /// Vectors indexed by the node ids of the loaded network.
    Explicit { beta: Vec<f64>, delta: Vec<f64> },
    Sampled {
        beta_range: [f64; 2],
        delta_range: [f64; 2],
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    Zero,
    /// Indexed by the node ids of the loaded network.
    Explicit(Vec<f64>),
    /// Each component drawn from `[lo, hi)`.
    UniformRange {
        lo: f64,
        hi: f64,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsConfig {
    #[serde(default = "default_slack")]
    pub overshoot_slack: f64,
    #[serde(default = "default_converge_tol")]
    pub converge_tol: f64,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        DiagnosticsConfig {
            overshoot_slack: DEFAULT_OVERSHOOT_SLACK,
            converge_tol: DEFAULT_CONVERGE_TOL,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory_csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report_json: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub network: NetworkSource,
    #[serde(default)]
    pub normalize_in_weights: bool,
    /// Refuse graphs that are not strongly connected instead of keeping the
    /// largest component.
    #[serde(default)]
    pub strict_connectivity: bool,
    pub params: ParamSource,
    pub h: f64,
    pub x0: InitialState,
    pub horizon: usize,
    #[serde(default = "default_stop_tol")]
    pub stop_tol: f64,
    /// Pin nodes with zero curing rate to 1 instead of failing.
    #[serde(default)]
    pub permissive_zero_delta: bool,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    #[serde(default)]
    pub output: OutputPaths,
}

fn default_stop_tol() -> f64 {
    DEFAULT_STOP_TOL
}

fn default_slack() -> f64 {
    DEFAULT_OVERSHOOT_SLACK
}

fn default_converge_tol() -> f64 {
    DEFAULT_CONVERGE_TOL
}

/// Grid axes of a sweep; absent axes keep the base value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_range: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_range: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<usize>>,
    /// Replicate seeds; each one derives fresh network, parameter and
    /// initial-state seeds from the base ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub base: ExperimentConfig,
    pub grid: SweepGrid,
    pub output_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}
