//! Per-iteration CSV metrics.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::npg::IterationRecord;

pub const CSV_HEADER: [&str; 12] = [
    "run_id",
    "env",
    "transform",
    "seed",
    "zeta",
    "iteration",
    "avg_return",
    "episodes_used",
    "env_steps_used",
    "wall_clock_s",
    "theta_norm",
    "w_hat_norm",
];

/// One CSV row. Field order is the column order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub run_id: String,
    pub env: String,
    pub transform: String,
    pub seed: u64,
    pub zeta: f64,
    pub iteration: usize,
    pub avg_return: f64,
    pub episodes_used: usize,
    pub env_steps_used: usize,
    pub wall_clock_s: f64,
    pub theta_norm: f64,
    pub w_hat_norm: f64,
}

impl MetricsRow {
    pub fn new(run_id: &str, env: &str, transform: &str, seed: u64, zeta: f64, r: &IterationRecord) -> Self {
        MetricsRow {
            run_id: run_id.to_owned(),
            env: env.to_owned(),
            transform: transform.to_owned(),
            seed,
            zeta,
            iteration: r.iteration,
            avg_return: r.avg_return,
            episodes_used: r.episodes_used,
            env_steps_used: r.env_steps_used,
            wall_clock_s: r.wall_clock_s,
            theta_norm: r.theta_norm,
            w_hat_norm: r.w_hat_norm,
        }
    }

    /// The row with its timing column zeroed, for reproducibility checks.
    pub fn without_timing(&self) -> Self {
        MetricsRow {
            wall_clock_s: 0.0,
            ..self.clone()
        }
    }
}

pub fn write_rows<W: Write>(out: W, rows: &[MetricsRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<MetricsRow>> {
    let mut r = csv::Reader::from_reader(input);
    let rows = r.deserialize().collect::<std::result::Result<Vec<MetricsRow>, _>>()?;
    Ok(rows)
}

pub fn write_csv(path: &Path, rows: &[MetricsRow]) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_rows(std::io::BufWriter::new(file), rows)
}

pub fn read_csv(path: &Path) -> Result<Vec<MetricsRow>> {
    read_rows(std::fs::File::open(path)?)
}
