//! Trace CSV reading and writing. One row per solver call (plus one
//! initial-state row per run); `lambda` is empty for methods without a
//! damping parameter. Floats are written in shortest round-trip form, so
//! identical runs produce byte-identical files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::splitting::Trace;

/// One benchmark trace row. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance: String,
    pub method: String,
    pub iteration: usize,
    pub subiteration: usize,
    pub lambda: Option<f64>,
    pub energy: f64,
    pub best_energy: f64,
    pub wall_ms: f64,
    pub seed: u64,
}

/// Tags every row of a method trace with its benchmark cell identity.
pub fn rows_from_trace(instance: &str, method: &str, seed: u64, trace: &Trace) -> Vec<BenchRow> {
    trace
        .rows()
        .iter()
        .map(|r| BenchRow {
            instance: instance.to_string(),
            method: method.to_string(),
            iteration: r.iteration,
            subiteration: r.subiteration,
            lambda: r.lambda,
            energy: r.energy,
            best_energy: r.best_energy,
            wall_ms: r.wall_ms,
            seed,
        })
        .collect()
}

pub fn write_trace_csv(path: &Path, rows: &[BenchRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(std::io::Error::from)?;
    Ok(())
}

pub fn read_trace_csv(path: &Path) -> Result<Vec<BenchRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for rec in r.deserialize() {
        rows.push(rec?);
    }
    Ok(rows)
}
