// SPDX-License-Identifier: Apache-2.0

//! CSV and JSON output records. Angles are in degrees here.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::photon_sim::SweepPoint;

/// Monte Carlo sweep row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub channel: String,
    pub epsilon_deg: f64,
    pub scheme: String,
    pub mean_err_sq: f64,
    pub std_err_sq: f64,
    pub runs: usize,
    pub photons: u64,
}

impl From<&SweepPoint> for SweepRow {
    fn from(p: &SweepPoint) -> Self {
        Self {
            channel: p.channel.name().to_string(),
            epsilon_deg: p.epsilon.to_degrees(),
            scheme: p.scheme.clone(),
            mean_err_sq: p.mean_err_sq,
            std_err_sq: p.std_err_sq,
            runs: p.runs,
            photons: p.photons,
        }
    }
}

/// Exact (infinite-statistics) systematic error `‖Δs‖²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticRow {
    pub channel: String,
    pub epsilon_deg: f64,
    pub scheme: String,
    pub err_sq: f64,
}

/// Deviation of the effective measurement vector, `‖r_e − r0‖`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorErrorRow {
    pub channel: String,
    pub epsilon_deg: f64,
    pub scheme: String,
    pub err_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeRow {
    pub channel: String,
    pub scheme: String,
    pub slope: f64,
}

/// JSON document carrying the resolved run configuration next to the data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance<C, D> {
    pub config: C,
    pub data: D,
}

pub fn write_csv<W: Write, R: Serialize>(w: W, rows: &[R]) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn csv_string<R: Serialize>(rows: &[R]) -> csv::Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}
