//! CSV and JSON persistence of experiment results.

use std::io::Write;

use crate::error::{HarnessError, Result};
use crate::experiment::{ExperimentResult, MetricsRow};

pub const CSV_HEADER: [&str; 19] = [
    "problem",
    "algo",
    "seed",
    "d",
    "N",
    "r",
    "m",
    "mu",
    "kappa",
    "iters",
    "cpu_seconds",
    "phi",
    "var",
    "sparsity",
    "nmi",
    "rgs_gres",
    "rgs_yres",
    "ros_gres",
    "converged",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn cell<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

pub fn csv_cells(r: &MetricsRow) -> [String; 19] {
    [
        r.problem.clone(),
        r.algo.clone(),
        r.seed.to_string(),
        r.d.to_string(),
        r.n.to_string(),
        cell(r.r),
        cell(r.m),
        cell(r.mu),
        cell(r.kappa),
        cell(r.iters),
        cell(r.cpu_seconds),
        cell(r.phi),
        cell(r.var),
        cell(r.sparsity),
        cell(r.nmi),
        cell(r.rgs_gres),
        cell(r.rgs_yres),
        cell(r.ros_gres),
        r.converged.to_string(),
    ]
}

pub fn write_csv<W: Write>(out: W, rows: &[MetricsRow]) -> Result<()> {
    let csv_err = |source| HarnessError::Csv {
        path: "output".into(),
        source,
    };
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record(csv_cells(r)).map_err(csv_err)?;
    }
    w.flush().map_err(|e| csv_err(e.into()))?;
    Ok(())
}

pub fn write_json<W: Write>(out: W, result: &ExperimentResult) -> Result<()> {
    serde_json::to_writer_pretty(out, result)?;
    Ok(())
}

pub fn write_result<W: Write>(out: W, result: &ExperimentResult, format: Format) -> Result<()> {
    match format {
        Format::Csv => write_csv(out, &result.rows),
        Format::Json => write_json(out, result),
    }
}

/// A fixed-width table of the per-algorithm means.
pub fn render_summary(result: &ExperimentResult) -> String {
    let opt = |v: Option<f64>, p: usize| v.map_or_else(|| "-".to_string(), |v| format!("{v:.p$}"));
    let mut s = format!(
        "{:<10} {:<9} {:>5} {:>5} {:>7} {:>12} {:>9} {:>9} {:>7} {:>7} {:>6} {:>5}\n",
        "problem", "algo", "d", "N", "mu", "phi", "iters", "cpu", "var", "spar", "nmi", "fail"
    );
    for m in &result.summary {
        s.push_str(&format!(
            "{:<10} {:<9} {:>5} {:>5} {:>7} {:>12} {:>9} {:>9} {:>7} {:>7} {:>6} {:>5}\n",
            m.problem,
            m.algo,
            m.d,
            m.n,
            m.mu.map_or_else(|| "-".into(), |v| v.to_string()),
            opt(m.phi, 4),
            opt(m.iters, 1),
            opt(m.cpu_seconds, 3),
            opt(m.var, 3),
            opt(m.sparsity, 1),
            opt(m.nmi, 3),
            m.failures,
        ));
    }
    s
}
