// SPDX-License-Identifier: Apache-2.0

//! Command-line and config-file surface. Angles are degrees here.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "wpecm", version, about = "Wave-plate measurement errors and error-compensation schemes")]
pub struct Cli {
    /// JSON file holding a full run configuration (`{"command": "measure", ...}`).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<RunConfig>,
}

/// Fully resolved run configuration; echoed into every output.
#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunConfig {
    /// Ideal and realized measurement vector of one setting.
    Measure(MeasureArgs),
    /// Four-setting ECM for a seed setting, with its sensitivity report.
    Ecm(SettingArgs),
    /// Second-order systematic-error coefficients and budgets for Pauli tomography.
    Budget(BudgetArgs),
    /// Parameter sweeps writing CSV and JSON.
    Sweep(SweepArgs),
    /// One Monte Carlo tomography experiment.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SettingArgs {
    /// QWP angle, degrees.
    #[arg(long, allow_negative_numbers = true)]
    pub q: f64,
    /// HWP angle, degrees.
    #[arg(long, allow_negative_numbers = true)]
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Args, Serialize, Deserialize)]
pub struct ErrArgs {
    /// QWP axis deviation, degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    #[serde(default)]
    pub eps_q: f64,
    /// HWP axis deviation, degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    #[serde(default)]
    pub eps_h: f64,
    /// QWP retardance deviation, degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    #[serde(default)]
    pub eps_dq: f64,
    /// HWP retardance deviation, degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    #[serde(default)]
    pub eps_dh: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct MeasureArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub setting: SettingArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub err: ErrArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct BudgetArgs {
    /// `s1`, `s2` or a Bloch vector `x,y,z`.
    #[arg(long, default_value = "s1")]
    pub state: String,
    /// Axis error used for both plates, degrees.
    #[arg(long, default_value_t = 0.1)]
    pub angle_err: f64,
    /// Retardance error used for both plates, degrees.
    #[arg(long, default_value_t = 1.2)]
    pub phase_err: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Recipe {
    Fig2,
    Fig3Upper,
    Fig3Lower,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeChoice {
    Ncm,
    Ecm,
    Both,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value = "custom")]
    pub recipe: Recipe,
    /// Master seed for the Monte Carlo streams.
    #[arg(long)]
    pub seed: u64,
    /// Output path prefix; `.csv` and `.json` (and companions) are appended.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeChoice>,
    /// `s1`, `s2` or `x,y,z`.
    #[arg(long)]
    pub state: Option<String>,
    /// Channels to sweep (`q`, `h`, `dq`, `dh`); all when omitted.
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub channel: Vec<String>,
    /// Monte Carlo deviations, degrees, ascending.
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub grid: Vec<f64>,
    #[arg(long)]
    pub photons: Option<u64>,
    #[arg(long)]
    pub runs: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "ncm")]
    pub scheme: SchemeChoice,
    #[arg(long, default_value = "s1")]
    pub state: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub err: ErrArgs,
    #[arg(long, default_value_t = 3_000_000)]
    pub photons: u64,
    #[arg(long, default_value_t = 5)]
    pub runs: usize,
    #[arg(long)]
    pub seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
