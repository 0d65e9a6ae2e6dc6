//! Config-driven experiment runner and parameter sweeps.
//!
//! A run loads or generates the network, keeps its largest strongly
//! connected component, optionally normalizes in-weights, validates the
//! model, classifies the regime, computes the endemic equilibrium and error
//! system when they exist, simulates, and finally runs the trajectory
//! diagnostics. Results go to a trajectory CSV and a report JSON; both are
//! pure functions of the config.

mod config;
mod csv;
mod report;
mod run;
mod sweep;

use std::path::PathBuf;

use thiserror::Error;

use crate::equilibrium::EquilibriumError;
use crate::graphio::GraphError;
use crate::model::ModelError;
use crate::spectral::SpectralError;
use crate::stability::StabilityError;

pub use config::{
    DiagnosticsConfig, ExperimentConfig, InitialState, NetworkSource, OutputPaths, ParamSource,
    SweepConfig, SweepGrid,
};
pub use csv::{trajectory_from_csv, trajectory_to_csv};
pub use report::{ErrorEntry, OvershootCounts, Report};
pub use run::{
    execute, graph_info, load_config, prepare, rediagnose, run_experiment, validate, GraphInfo,
    Prepared, RunOutcome,
};
pub use sweep::{load_sweep_config, run_sweep, SweepCell, SweepOutcome};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExperimentError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("graph is not strongly connected and strict_connectivity is set")]
    StrictConnectivity,
    #[error("trajectory csv: {0}")]
    Csv(String),
    #[error("sweep grid is empty")]
    EmptyGrid,
    #[error("sweep cell: {0}")]
    Cell(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Equilibrium(#[from] EquilibriumError),
    #[error(transparent)]
    Stability(#[from] StabilityError),
}

impl ExperimentError {
    /// Module-qualified error code, e.g. `model.AssumptionThreeViolated`.
    pub fn code(&self) -> String {
        match self {
            ExperimentError::Parse(_) => "config.Parse".into(),
            ExperimentError::Config(_) => "config.Invalid".into(),
            ExperimentError::Io { .. } => "io.Failed".into(),
            ExperimentError::StrictConnectivity => "graphio.NotStronglyConnected".into(),
            ExperimentError::Csv(_) => "csv.Malformed".into(),
            ExperimentError::EmptyGrid => "sweep.EmptyGrid".into(),
            ExperimentError::Cell(_) => "sweep.InvalidCell".into(),
            ExperimentError::Graph(e) => format!("graphio.{}", e.code()),
            ExperimentError::Model(e) => format!("model.{}", e.code()),
            ExperimentError::Spectral(e) => format!("spectral.{}", e.code()),
            ExperimentError::Equilibrium(e) => format!("equilibrium.{}", e.code()),
            ExperimentError::Stability(e) => format!("stability.{}", e.code()),
        }
    }

    pub fn entry(&self) -> ErrorEntry {
        ErrorEntry {
            code: self.code(),
            message: self.to_string(),
        }
    }
}
