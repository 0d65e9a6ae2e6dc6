//! Trajectory CSV: header `k,x_0,...,x_{N-1}`, one row per step, values at
//! 17 significant digits so a re-read reproduces every state bit-for-bit.

use std::fmt::Write as _;

use super::ExperimentError;

pub fn trajectory_to_csv(states: &[Vec<f64>]) -> String {
    let n = states.first().map_or(0, Vec::len);
    let mut out = String::from("k");
    for i in 0..n {
        write!(out, ",x_{i}").unwrap();
    }
    out.push('\n');
    for (k, state) in states.iter().enumerate() {
        write!(out, "{k}").unwrap();
        for v in state {
            write!(out, ",{v:.16e}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn trajectory_from_csv(text: &str) -> Result<Vec<Vec<f64>>, ExperimentError> {
    let bad = |line: usize, what: &str| ExperimentError::Csv(format!("line {line}: {what}"));
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad(1, "missing header"))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.first() != Some(&"k")
        || cols[1..]
            .iter()
            .enumerate()
            .any(|(i, c)| *c != format!("x_{i}"))
    {
        return Err(bad(1, "header must be k,x_0,...,x_{N-1}"));
    }
    let n = cols.len() - 1;
    let mut states = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != n + 1 {
            return Err(bad(line_no, "wrong column count"));
        }
        let k: usize = fields[0]
            .parse()
            .map_err(|_| bad(line_no, "bad step index"))?;
        if k != states.len() {
            return Err(bad(line_no, "step indices must be consecutive from 0"));
        }
        let state = fields[1..]
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| bad(line_no, "bad value")))
            .collect::<Result<Vec<_>, _>>()?;
        states.push(state);
    }
    if states.is_empty() {
        return Err(bad(2, "no rows"));
    }
    Ok(states)
}
