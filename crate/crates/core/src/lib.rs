//! Simulation and stability analysis for the discrete-time networked SIS
//! epidemic model with heterogeneous infection and curing rates.
//!
//! The pieces, bottom-up:
//!
//! - [`graphio`]: weighted directed graphs, edge-list I/O, strongly
//!   connected components, in-weight normalization and a seeded generator.
//! - [`model`]: parameters, assumption checks, `step` / `simulate`.
//! - [`spectral`]: Perron vectors, the `ρ(I - hD + hB)` threshold and
//!   Collatz–Wielandt comparisons.
//! - [`equilibrium`]: the endemic fixed point and its bounds.
//! - [`stability`]: error-system matrices, overshoot, Lyapunov and rate
//!   diagnostics.
//! - [`experiment`]: JSON-configured runs and parameter sweeps that write
//!   trajectory CSVs and report JSON.
//!
//! ```
//! use netsis::graphio::{normalize_in_weights, parse_edge_list};
//! use netsis::model::{build_and_validate, SisParams};
//! use netsis::spectral::{classify_regime, Regime};
//!
//! let g = normalize_in_weights(&parse_edge_list("0 1\n1 0").unwrap()).unwrap();
//! let (model, _) = build_and_validate(&g, &SisParams::homogeneous(2, 0.5, 0.25, 1.0)).unwrap();
//! let label = classify_regime(&model).unwrap();
//! assert_eq!(label.regime, Regime::EndemicExists);
//! assert!((label.rho_threshold - 1.25).abs() < 1e-12);
//! ```

pub mod equilibrium;
pub mod experiment;
pub mod graphio;
pub mod matrix;
pub mod model;
pub mod spectral;
pub mod stability;

pub use graphio::Graph;
pub use matrix::Matrix;
pub use model::{SisModel, SisParams, Trajectory};
