// SPDX-License-Identifier: Apache-2.0

//! Preset parameter sweeps: measurement-vector error versus deviation for a
//! single setting and its ECM (`fig2`), and tomography error versus deviation
//! with Monte Carlo points for the two reference states (`fig3-upper`,
//! `fig3-lower`).

use serde::{Deserialize, Serialize};

use crate::ecm::{ecm4, effective_vector, AngleSetting, CompositeMeasurement};
use crate::error::Result;
use crate::error_model::{geometric_grid, scaling_exponent, DeviceError, ErrorChannel};
use crate::linalg::Vec3;
use crate::photon_sim::{error_sweep_from, ExperimentConfig, DEFAULT_PHOTONS_PER_ARM, DEFAULT_RUNS};
use crate::report::{AnalyticRow, SlopeRow, SweepRow, VectorErrorRow};
use crate::tomography::{pauli_scheme, systematic_error_exact, Mode, QubitState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig2Recipe {
    pub q_deg: f64,
    pub h_deg: f64,
    pub eps_min_deg: f64,
    pub eps_max_deg: f64,
    pub samples: usize,
}

impl Default for Fig2Recipe {
    fn default() -> Self {
        Self { q_deg: 30.0, h_deg: 13.0, eps_min_deg: 0.01, eps_max_deg: 2.0, samples: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig2Output {
    pub rows: Vec<VectorErrorRow>,
    pub slopes: Vec<SlopeRow>,
}

fn composite_for(mode: Mode, seed: AngleSetting<f64>) -> CompositeMeasurement<f64> {
    match mode {
        Mode::Ncm => CompositeMeasurement::single(seed),
        Mode::Ecm => ecm4(seed),
    }
}

/// `‖r_e(ε) − r0‖` for one channel.
pub fn vector_error(cm: &CompositeMeasurement<f64>, channel: ErrorChannel, eps: f64) -> f64 {
    (effective_vector(cm, &DeviceError::along(channel, eps)) - cm.ideal_vector()).norm()
}

pub fn run_fig2(recipe: &Fig2Recipe) -> Result<Fig2Output> {
    let seed = AngleSetting::from_degrees(recipe.q_deg, recipe.h_deg);
    let (lo, hi) = (recipe.eps_min_deg.to_radians(), recipe.eps_max_deg.to_radians());
    let grid = geometric_grid(lo, hi, recipe.samples);
    let mut rows = Vec::new();
    let mut slopes = Vec::new();
    for mode in [Mode::Ncm, Mode::Ecm] {
        let cm = composite_for(mode, seed);
        for channel in ErrorChannel::ALL {
            for &eps in &grid {
                rows.push(VectorErrorRow {
                    channel: channel.name().into(),
                    epsilon_deg: eps.to_degrees(),
                    scheme: mode.name().into(),
                    err_norm: vector_error(&cm, channel, eps),
                });
            }
            let slope = scaling_exponent(|e| vector_error(&cm, channel, e), (lo, hi), recipe.samples)?;
            slopes.push(SlopeRow { channel: channel.name().into(), scheme: mode.name().into(), slope });
        }
    }
    Ok(Fig2Output { rows, slopes })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig3Recipe {
    pub state: [f64; 3],
    pub modes: Vec<Mode>,
    pub channels: Vec<ErrorChannel>,
    /// Deviations at which the Monte Carlo is run, degrees.
    pub grid_deg: Vec<f64>,
    /// Deviations for the exact curve, degrees.
    pub analytic_grid_deg: Vec<f64>,
    pub photons: u64,
    pub runs: usize,
    pub seed: u64,
}

impl Fig3Recipe {
    fn preset(state: [f64; 3], seed: u64) -> Self {
        let deg = |v: Vec<f64>| v.into_iter().map(|x| (x * 1e6).round() / 1e6).collect();
        Self {
            state,
            modes: vec![Mode::Ncm, Mode::Ecm],
            channels: ErrorChannel::ALL.to_vec(),
            grid_deg: deg(geometric_grid(0.1, 5.0, 8)),
            analytic_grid_deg: deg(geometric_grid(0.01, 5.0, 40)),
            photons: DEFAULT_PHOTONS_PER_ARM,
            runs: DEFAULT_RUNS,
            seed,
        }
    }

    /// State `(0.346, −0.446, 0.425)`.
    pub fn upper(seed: u64) -> Self {
        Self::preset(QubitState::<f64>::s1().s.to_array(), seed)
    }

    /// State `(0, 0.707, 0)`.
    pub fn lower(seed: u64) -> Self {
        Self::preset(QubitState::<f64>::s2().s.to_array(), seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig3Output {
    pub analytic: Vec<AnalyticRow>,
    pub monte_carlo: Vec<SweepRow>,
}

pub fn run_fig3(recipe: &Fig3Recipe) -> Result<Fig3Output> {
    let state = QubitState::new(Vec3::from_array(recipe.state))?;
    let mut analytic = Vec::new();
    let mut monte_carlo = Vec::new();
    let grid: Vec<f64> = recipe.grid_deg.iter().map(|d| d.to_radians()).collect();
    let mut first_point = 0u32;
    for &mode in &recipe.modes {
        let scheme = pauli_scheme(mode);
        for &channel in &recipe.channels {
            for &d in &recipe.analytic_grid_deg {
                let err = DeviceError::along(channel, d.to_radians());
                analytic.push(AnalyticRow {
                    channel: channel.name().into(),
                    epsilon_deg: d,
                    scheme: mode.name().into(),
                    err_sq: systematic_error_exact(&scheme, &state, &err).norm_sq(),
                });
            }
            if !grid.is_empty() {
                let mut cfg = ExperimentConfig::new(scheme.clone(), state, DeviceError::ideal(), recipe.seed);
                cfg.photons_per_arm = recipe.photons;
                cfg.runs = recipe.runs;
                let points = error_sweep_from(&cfg, channel, &grid, first_point)?;
                first_point += grid.len() as u32;
                monte_carlo.extend(points.iter().map(SweepRow::from));
            }
        }
    }
    Ok(Fig3Output { analytic, monte_carlo })
}
