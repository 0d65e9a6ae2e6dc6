use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, InitialState, NetworkSource, ParamSource, SweepConfig};
use super::report::Report;
use super::run::{execute, resolve, write};
use super::ExperimentError;

pub fn load_sweep_config(path: &Path) -> Result<(SweepConfig, PathBuf), ExperimentError> {
    let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let config = serde_json::from_str(&text).map_err(|e| ExperimentError::Parse(e.to_string()))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((config, base))
}

/// Axis values of one grid cell.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SweepCell {
    pub id: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_range: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_range: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub cells: Vec<SweepCell>,
    pub reports: Vec<Report>,
    pub summary_csv: String,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn derive_seed(base: u64, replicate: u64, stream: u64) -> u64 {
    splitmix64(base ^ splitmix64(replicate.wrapping_mul(4).wrapping_add(stream)))
}

/// Cartesian product of the present axes, in the order
/// `h, beta_range, delta_range, n, seeds` (last axis fastest).
fn enumerate_cells(config: &SweepConfig) -> Result<Vec<SweepCell>, ExperimentError> {
    let g = &config.grid;
    let present = [
        g.h.as_ref().map(Vec::len),
        g.beta_range.as_ref().map(Vec::len),
        g.delta_range.as_ref().map(Vec::len),
        g.n.as_ref().map(Vec::len),
        g.seeds.as_ref().map(Vec::len),
    ];
    if present.iter().all(Option::is_none) || present.iter().any(|p| *p == Some(0)) {
        return Err(ExperimentError::EmptyGrid);
    }
    let mut cells = vec![SweepCell::default()];
    fn expand<T: Copy>(
        cells: Vec<SweepCell>,
        axis: &Option<Vec<T>>,
        set: impl Fn(&mut SweepCell, T),
    ) -> Vec<SweepCell> {
        let Some(values) = axis else { return cells };
        let mut out = Vec::with_capacity(cells.len() * values.len());
        for c in cells {
            for &v in values {
                let mut c = c.clone();
                set(&mut c, v);
                out.push(c);
            }
        }
        out
    }
    cells = expand(cells, &g.h, |c, v| c.h = Some(v));
    cells = expand(cells, &g.beta_range, |c, v| c.beta_range = Some(v));
    cells = expand(cells, &g.delta_range, |c, v| c.delta_range = Some(v));
    cells = expand(cells, &g.n, |c, v| c.n = Some(v));
    cells = expand(cells, &g.seeds, |c, v| c.seed = Some(v));
    for (id, c) in cells.iter_mut().enumerate() {
        c.id = id;
    }
    Ok(cells)
}

fn cell_dir(id: usize) -> String {
    format!("cell_{id:04}")
}

fn cell_config(
    base: &ExperimentConfig,
    cell: &SweepCell,
    out_dir: &Path,
) -> Result<ExperimentConfig, ExperimentError> {
    let mut c = base.clone();
    if let Some(h) = cell.h {
        c.h = h;
    }
    if cell.beta_range.is_some() || cell.delta_range.is_some() {
        let ParamSource::Sampled {
            beta_range,
            delta_range,
            ..
        } = &mut c.params
        else {
            return Err(ExperimentError::Cell(
                "beta_range/delta_range axes need sampled params".into(),
            ));
        };
        if let Some(b) = cell.beta_range {
            *beta_range = b;
        }
        if let Some(d) = cell.delta_range {
            *delta_range = d;
        }
    }
    if let Some(n_cell) = cell.n {
        let NetworkSource::Generate { n, .. } = &mut c.network else {
            return Err(ExperimentError::Cell(
                "n axis needs a generated network".into(),
            ));
        };
        *n = n_cell;
    }
    if let Some(rep) = cell.seed {
        if let NetworkSource::Generate { seed, .. } = &mut c.network {
            *seed = derive_seed(*seed, rep, 0);
        }
        if let ParamSource::Sampled { seed, .. } = &mut c.params {
            *seed = derive_seed(*seed, rep, 1);
        }
        if let InitialState::UniformRange { seed, .. } = &mut c.x0 {
            *seed = derive_seed(*seed, rep, 2);
        }
    }
    let dir = out_dir.join(cell_dir(cell.id));
    c.output.trajectory_csv = Some(dir.join("trajectory.csv"));
    c.output.report_json = Some(dir.join("report.json"));
    Ok(c)
}

fn run_cell(config: &SweepConfig, base_dir: &Path, out_dir: &Path, cell: &SweepCell) -> Report {
    let cfg = match cell_config(&config.base, cell, out_dir) {
        Ok(c) => c,
        Err(e) => {
            return Report {
                errors: vec![e.entry()],
                ..Report::default()
            }
        }
    };
    let outcome = execute(&cfg, base_dir);
    let mut report = outcome.report.clone();
    let persist = || -> Result<(), ExperimentError> {
        if let (Some(path), Some(csv)) = (&cfg.output.trajectory_csv, outcome.trajectory_csv()) {
            write(path, &csv)?;
        }
        if let Some(path) = &cfg.output.report_json {
            write(path, &outcome.report_json())?;
        }
        Ok(())
    };
    if let Err(e) = persist() {
        report.errors.push(e.entry());
    }
    report
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn summary_csv(reports: &[Report]) -> String {
    let mut out = String::from(
        "cell_id,rho_threshold,regime,rho_xi,converged_to,steps_to_tolerance,errors\n",
    );
    for (id, r) in reports.iter().enumerate() {
        let errors: Vec<&str> = r.errors.iter().map(|e| e.code.as_str()).collect();
        writeln!(
            out,
            "{id},{},{},{},{},{},{}",
            opt(r.rho_threshold.map(|v| format!("{v:.16e}"))),
            opt(r.regime.map(|v| format!("{v:?}"))),
            opt(r.rho_xi.map(|v| format!("{v:.16e}"))),
            opt(r.converged_to.map(|v| format!("{v:?}"))),
            opt(r.steps_to_tolerance),
            errors.join(";"),
        )
        .unwrap();
    }
    out
}

/// Runs every cell (in parallel when `workers > 1`) and writes per-cell
/// outputs, `cells.json` and `summary.csv` under `output_dir`. Results are
/// keyed by cell id, so they do not depend on the worker count.
pub fn run_sweep(
    config: &SweepConfig,
    base_dir: &Path,
    workers: Option<usize>,
) -> Result<SweepOutcome, ExperimentError> {
    let cells = enumerate_cells(config)?;
    let out_dir = resolve(base_dir, &config.output_dir);
    let workers = workers.or(config.workers).unwrap_or(1).max(1);
    let reports: Vec<Report> = if workers == 1 {
        cells
            .iter()
            .map(|c| run_cell(config, base_dir, &out_dir, c))
            .collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| ExperimentError::Config(e.to_string()))?;
        pool.install(|| {
            cells
                .par_iter()
                .map(|c| run_cell(config, base_dir, &out_dir, c))
                .collect()
        })
    };
    let summary = summary_csv(&reports);
    write(&out_dir.join("summary.csv"), &summary)?;
    let mut cells_json = serde_json::to_string_pretty(&cells).expect("cells serialize");
    cells_json.push('\n');
    write(&out_dir.join("cells.json"), &cells_json)?;
    Ok(SweepOutcome {
        cells,
        reports,
        summary_csv: summary,
    })
}
