use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{ExperimentConfig, InitialState, NetworkSource, ParamSource};
use super::csv::{trajectory_from_csv, trajectory_to_csv};
use super::report::{OvershootCounts, Report};
use super::ExperimentError;
use crate::equilibrium::{solve_endemic, EquilibriumReport, SolveOptions};
use crate::graphio::{
    normalize_in_weights, parse_edge_list, random_strongly_connected, strongly_connected_analysis,
    Graph,
};
use crate::matrix::diff_inf;
use crate::model::{
    build_and_validate, sample_params, AssumptionReport, SisModel, SisParams, StopReason,
    Trajectory,
};
use crate::spectral::{classify_regime, Regime, RegimeLabel};
use crate::stability::{build_error_system, diagnose, DiagnosticOptions, ErrorSystem};

pub(crate) fn resolve(base_dir: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base_dir.join(p)
    }
}

fn read(path: &Path) -> Result<String, ExperimentError> {
    fs::read_to_string(path).map_err(|e| ExperimentError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub(crate) fn write(path: &Path, contents: &str) -> Result<(), ExperimentError> {
    let io = |e: std::io::Error| ExperimentError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(io)?;
        }
    }
    fs::write(path, contents).map_err(io)
}

/// Reads a config file; returns it with the directory used to resolve
/// relative paths.
pub fn load_config(path: &Path) -> Result<(ExperimentConfig, PathBuf), ExperimentError> {
    let text = read(path)?;
    let config = serde_json::from_str(&text).map_err(|e| ExperimentError::Parse(e.to_string()))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((config, base))
}

/// Everything computed before the simulation starts.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub model: SisModel,
    pub assumption: AssumptionReport,
    pub regime: RegimeLabel,
    pub equilibrium: Option<EquilibriumReport>,
    pub error_system: Option<ErrorSystem>,
    pub x0: Vec<f64>,
    pub warnings: Vec<String>,
    /// Non-fatal failures (equilibrium or error-system construction).
    pub errors: Vec<ExperimentError>,
}

fn load_graph(config: &ExperimentConfig, base_dir: &Path) -> Result<Graph, ExperimentError> {
    match &config.network {
        NetworkSource::EdgeList(path) => Ok(parse_edge_list(&read(&resolve(base_dir, path))?)?),
        NetworkSource::Generate {
            n,
            extra_edge_prob,
            seed,
        } => {
            if *n == 0 || !(0.0..=1.0).contains(extra_edge_prob) {
                return Err(ExperimentError::Config(
                    "generate needs n >= 1 and extra_edge_prob in [0, 1]".into(),
                ));
            }
            Ok(random_strongly_connected(*n, *extra_edge_prob, *seed))
        }
    }
}

/// Picks the entries of a per-node vector given over the loaded network.
fn select(
    values: &[f64],
    labels: &[u64],
    loaded_n: usize,
    what: &str,
) -> Result<Vec<f64>, ExperimentError> {
    if values.len() != loaded_n {
        return Err(ExperimentError::Config(format!(
            "{what} has {} entries, network has {loaded_n} nodes",
            values.len()
        )));
    }
    Ok(labels.iter().map(|&l| values[l as usize]).collect())
}

fn initial_state(
    source: &InitialState,
    labels: &[u64],
    loaded_n: usize,
) -> Result<Vec<f64>, ExperimentError> {
    match source {
        InitialState::Zero => Ok(vec![0.0; labels.len()]),
        InitialState::Explicit(v) => select(v, labels, loaded_n, "x0"),
        InitialState::UniformRange { lo, hi, seed } => {
            if !(*lo >= 0.0 && lo < hi && *hi <= 1.0) {
                return Err(ExperimentError::Config(format!(
                    "x0 range [{lo}, {hi}) must lie in [0, 1]"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            Ok((0..labels.len()).map(|_| rng.gen_range(*lo..*hi)).collect())
        }
    }
}

/// Graph loading, validation, regime, equilibrium and error system.
pub fn prepare(config: &ExperimentConfig, base_dir: &Path) -> Result<Prepared, ExperimentError> {
    let mut warnings = Vec::new();
    let loaded = load_graph(config, base_dir)?;
    let loaded_n = loaded.n();
    let scc = strongly_connected_analysis(&loaded);
    let mut graph = if scc.is_strongly_connected {
        loaded
    } else if config.strict_connectivity {
        return Err(ExperimentError::StrictConnectivity);
    } else {
        warnings.push(format!(
            "graph is not strongly connected; using the largest component ({} of {} nodes)",
            scc.largest_component().len(),
            loaded_n
        ));
        scc.largest_component_subgraph
    };
    if config.normalize_in_weights {
        graph = normalize_in_weights(&graph)?;
    }
    let labels = graph.labels();

    let params = match &config.params {
        ParamSource::Explicit { beta, delta } => SisParams {
            beta: select(beta, &labels, loaded_n, "beta")?,
            delta: select(delta, &labels, loaded_n, "delta")?,
            h: config.h,
        },
        ParamSource::Sampled {
            beta_range,
            delta_range,
            seed,
        } => sample_params(
            (beta_range[0], beta_range[1]),
            (delta_range[0], delta_range[1]),
            config.h,
            graph.n(),
            *seed,
        )?,
    };
    let x0 = initial_state(&config.x0, &labels, loaded_n)?;

    let (model, assumption) = build_and_validate(&graph, &params)?;
    if assumption.near_boundary {
        warnings.push(format!(
            "node {} sits on the step-size boundary (value {:e})",
            assumption.worst_node, assumption.worst_value
        ));
    }
    if !assumption.zero_delta_nodes.is_empty() {
        warnings.push(format!(
            "nodes with zero curing rate: {:?}; error-system diagnostics unavailable",
            assumption.zero_delta_nodes
        ));
    }
    let regime = classify_regime(&model)?;
    if regime.boundary_warning {
        warnings.push(format!(
            "threshold spectral radius {} is within the regime band around 1",
            regime.rho_threshold
        ));
    }

    let mut errors = Vec::new();
    let mut equilibrium = None;
    let mut error_system = None;
    if regime.regime == Regime::EndemicExists {
        let opts = SolveOptions {
            strict: !config.permissive_zero_delta,
            ..Default::default()
        };
        match solve_endemic(&model, &opts) {
            Ok(eq) => {
                if assumption.zero_delta_nodes.is_empty() {
                    match build_error_system(&model, &eq.x_star) {
                        Ok(es) => error_system = Some(es),
                        Err(e) => errors.push(e.into()),
                    }
                }
                equilibrium = Some(eq);
            }
            Err(e) => errors.push(e.into()),
        }
    }

    Ok(Prepared {
        model,
        assumption,
        regime,
        equilibrium,
        error_system,
        x0,
        warnings,
        errors,
    })
}

fn diagnostic_options(config: &ExperimentConfig) -> DiagnosticOptions {
    DiagnosticOptions {
        overshoot_slack: config.diagnostics.overshoot_slack,
        converge_tol: config.diagnostics.converge_tol,
    }
}

fn prepared_report(prep: &Prepared) -> Report {
    let eq = prep.equilibrium.as_ref();
    let es = prep.error_system.as_ref();
    Report {
        fingerprint: Some(prep.model.fingerprint().to_string()),
        n: Some(prep.model.n()),
        node_labels: Some(prep.model.graph().labels()),
        assumption_worst: Some(prep.assumption.worst_value),
        rho_threshold: Some(prep.regime.rho_threshold),
        regime: Some(prep.regime.regime),
        boundary_warning: Some(prep.regime.boundary_warning),
        x_star: eq.map(|e| e.x_star.clone()),
        equilibrium_residual: eq.map(|e| e.residual_inf),
        bounds: eq.map(|e| e.bounds.clone()),
        rho_xi: es.map(|e| e.rho_xi),
        f_mu_residual: es.map(|e| e.f_mu_residual),
        warnings: prep.warnings.clone(),
        errors: prep.errors.iter().map(ExperimentError::entry).collect(),
        ..Report::default()
    }
}

fn full_report(prep: &Prepared, traj: &Trajectory, opts: &DiagnosticOptions) -> Report {
    let mut report = prepared_report(prep);
    let d = diagnose(
        &prep.model,
        prep.equilibrium.as_ref(),
        prep.error_system.as_ref(),
        traj,
        opts,
    );
    if let Some(o) = &d.overshoot {
        report.initial_class = Some(o.initial_class);
        report.overshoot = Some(OvershootCounts {
            up: o.up,
            down: o.down,
        });
        report.overshoot_verdict = o.verdict;
    }
    report.hitting_time = d.hitting_time;
    report.lyapunov_monotone = d.lyapunov.as_ref().map(|l| l.monotone);
    report.lyapunov_max_identity_error = d.lyapunov.as_ref().map(|l| l.max_identity_error);
    report.empirical_rate = d.empirical_rate;
    report.converged_to = Some(d.converged_to);
    report.final_error_inf = Some(d.final_error_inf);
    report.steps = Some(traj.steps());
    report.steps_to_tolerance = d.steps_to_tolerance;
    report.stop_reason = Some(traj.stop_reason);
    report.warnings.extend(d.notes);
    report
}

/// Checks the config up to the equilibrium without simulating.
pub fn validate(config: &ExperimentConfig, base_dir: &Path) -> Report {
    match prepare(config, base_dir) {
        Ok(prep) => prepared_report(&prep),
        Err(e) => Report {
            errors: vec![e.entry()],
            ..Report::default()
        },
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: Report,
    pub trajectory: Option<Trajectory>,
}

impl RunOutcome {
    pub fn is_ok(&self) -> bool {
        self.report.is_ok()
    }

    pub fn report_json(&self) -> String {
        self.report.to_json()
    }

    pub fn trajectory_csv(&self) -> Option<String> {
        self.trajectory
            .as_ref()
            .map(|t| trajectory_to_csv(&t.states))
    }
}

/// Runs the full pipeline in memory.
pub fn execute(config: &ExperimentConfig, base_dir: &Path) -> RunOutcome {
    let prep = match prepare(config, base_dir) {
        Ok(p) => p,
        Err(e) => {
            return RunOutcome {
                report: Report {
                    errors: vec![e.entry()],
                    ..Report::default()
                },
                trajectory: None,
            }
        }
    };
    match prep
        .model
        .simulate(&prep.x0, config.horizon, config.stop_tol)
    {
        Ok(traj) => RunOutcome {
            report: full_report(&prep, &traj, &diagnostic_options(config)),
            trajectory: Some(traj),
        },
        Err(e) => {
            let mut report = prepared_report(&prep);
            report.errors.push(ExperimentError::from(e).entry());
            RunOutcome {
                report,
                trajectory: None,
            }
        }
    }
}

/// [`execute`] plus writing the configured output files.
pub fn run_experiment(
    config: &ExperimentConfig,
    base_dir: &Path,
) -> Result<RunOutcome, ExperimentError> {
    let outcome = execute(config, base_dir);
    if let (Some(path), Some(csv)) = (&config.output.trajectory_csv, outcome.trajectory_csv()) {
        write(&resolve(base_dir, path), &csv)?;
    }
    if let Some(path) = &config.output.report_json {
        write(&resolve(base_dir, path), &outcome.report_json())?;
    }
    Ok(outcome)
}

/// Recomputes the report from a previously written trajectory CSV.
pub fn rediagnose(
    config: &ExperimentConfig,
    base_dir: &Path,
    csv: &str,
) -> Result<Report, ExperimentError> {
    let prep = prepare(config, base_dir)?;
    let states = trajectory_from_csv(csv)?;
    prep.model.check_state(&states[0])?;
    let converged = states.len() >= 2
        && diff_inf(&states[states.len() - 1], &states[states.len() - 2]) < config.stop_tol;
    let traj = Trajectory {
        states,
        stop_reason: if converged {
            StopReason::Converged {
                tolerance: config.stop_tol,
            }
        } else {
            StopReason::Horizon
        },
        fingerprint: prep.model.fingerprint().to_string(),
    };
    Ok(full_report(&prep, &traj, &diagnostic_options(config)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphInfo {
    pub n: usize,
    pub edges: usize,
    pub strongly_connected: bool,
    pub components: usize,
    pub largest_component: usize,
    pub min_in_degree: usize,
    pub max_in_degree: usize,
    pub min_out_degree: usize,
    pub max_out_degree: usize,
    pub zero_in_degree_nodes: Vec<usize>,
}

pub fn graph_info(g: &Graph) -> GraphInfo {
    let scc = strongly_connected_analysis(g);
    let ins: Vec<usize> = (0..g.n()).map(|i| g.in_degree(i)).collect();
    let outs: Vec<usize> = (0..g.n()).map(|i| g.out_degree(i)).collect();
    GraphInfo {
        n: g.n(),
        edges: g.edge_count(),
        strongly_connected: scc.is_strongly_connected,
        components: scc.components.len(),
        largest_component: scc.largest_component().len(),
        min_in_degree: ins.iter().copied().min().unwrap_or(0),
        max_in_degree: ins.iter().copied().max().unwrap_or(0),
        min_out_degree: outs.iter().copied().min().unwrap_or(0),
        max_out_degree: outs.iter().copied().max().unwrap_or(0),
        zero_in_degree_nodes: (0..g.n()).filter(|&i| ins[i] == 0).collect(),
    }
}
