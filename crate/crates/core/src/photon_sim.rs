// SPDX-License-Identifier: Apache-2.0

//! Finite-statistics Monte Carlo of the tomography experiment.
//!
//! Each arm gets a fixed photon budget, split equally over its settings.
//! For a setting realizing `r` the `+1` outcome has probability
//! `(1 + r.s)/2`; counts are drawn from the binomial distribution directly.
//!
//! Random streams are ChaCha20 keyed by the master seed with the stream id
//! `(point << 32) | run`, so results do not depend on execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ecm::CompositeMeasurement;
use crate::error::{Error, Result};
use crate::error_model::{DeviceError, ErrorChannel};
use crate::linalg::Vec3;
use crate::linalg::Mat3;
use crate::tomography::{estimate, ProjectionRecord};
use crate::{Bloch, Scheme, State};

pub const DEFAULT_PHOTONS_PER_ARM: u64 = 3_000_000;
pub const DEFAULT_RUNS: usize = 5;

const PROBABILITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub photons_per_arm: u64,
    pub runs: usize,
    pub seed: u64,
    pub state: State,
    pub scheme: Scheme,
    pub err: DeviceError<f64>,
}

impl ExperimentConfig {
    pub fn new(scheme: Scheme, state: State, err: DeviceError<f64>, seed: u64) -> Self {
        Self {
            photons_per_arm: DEFAULT_PHOTONS_PER_ARM,
            runs: DEFAULT_RUNS,
            seed,
            state,
            scheme,
            err,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.photons_per_arm == 0 {
            return Err(Error::InvalidConfig("photons_per_arm must be at least 1".into()));
        }
        if self.runs == 0 {
            return Err(Error::InvalidConfig("runs must be at least 1".into()));
        }
        for arm in self.scheme.arms() {
            if !self.photons_per_arm.is_multiple_of(arm.len() as u64) {
                return Err(Error::InvalidConfig(format!(
                    "photons_per_arm {} not divisible by {} settings",
                    self.photons_per_arm,
                    arm.len()
                )));
            }
        }
        Ok(())
    }
}

/// Outcome counts of one angle setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub n_plus: u64,
    pub n_minus: u64,
}

impl Counts {
    pub fn total(&self) -> u64 {
        self.n_plus + self.n_minus
    }

    /// `2 n₊/N − 1`.
    pub fn expectation(&self) -> f64 {
        2.0 * self.n_plus as f64 / self.total() as f64 - 1.0
    }
}

/// Counts per arm, per setting within the arm.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRecord {
    pub arms: Vec<Vec<Counts>>,
}

/// `(1 + r.s)/2`, rejected if it leaves `[0, 1]` by more than 1e-12.
pub fn outcome_probability(r: Bloch, state: &State) -> Result<f64> {
    let p = 0.5 * (1.0 + r.dot(state.s));
    if !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&p) {
        return Err(Error::ProbabilityOutOfRange { p });
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Per-setting outcome probabilities, arranged like a [`CountRecord`].
pub fn outcome_probabilities(scheme: &Scheme, state: &State, err: &DeviceError<f64>) -> Result<Vec<Vec<f64>>> {
    scheme
        .arms()
        .iter()
        .map(|arm| {
            arm.settings()
                .iter()
                .map(|s| outcome_probability(s.realized_vector(err), state))
                .collect()
        })
        .collect()
}

pub fn rng_for(seed: u64, point: u32, run: u32) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream((u64::from(point) << 32) | u64::from(run));
    rng
}

/// Draws one full data set using the stream of run 0.
pub fn simulate_counts(cfg: &ExperimentConfig) -> Result<CountRecord> {
    simulate_counts_with(cfg, &cfg.err, &mut rng_for(cfg.seed, 0, 0))
}

pub fn simulate_counts_with(cfg: &ExperimentConfig, err: &DeviceError<f64>, rng: &mut ChaCha20Rng) -> Result<CountRecord> {
    cfg.validate()?;
    let probs = outcome_probabilities(&cfg.scheme, &cfg.state, err)?;
    let arms = probs
        .iter()
        .map(|arm| {
            let n = cfg.photons_per_arm / arm.len() as u64;
            arm.iter()
                .map(|&p| {
                    let n_plus = Binomial::new(n, p)
                        .map_err(|_| Error::ProbabilityOutOfRange { p })?
                        .sample(rng);
                    Ok(Counts { n_plus, n_minus: n - n_plus })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CountRecord { arms })
}

fn check_shape(scheme: &Scheme, counts: &CountRecord) -> Result<()> {
    if counts.arms.len() != 3 {
        return Err(Error::CountMismatch(format!("expected 3 arms, got {}", counts.arms.len())));
    }
    for (i, (arm, c)) in scheme.arms().iter().zip(&counts.arms).enumerate() {
        if arm.len() != c.len() {
            return Err(Error::CountMismatch(format!(
                "arm {i}: scheme has {} settings, record has {}",
                arm.len(),
                c.len()
            )));
        }
        if c.iter().any(|x| x.total() == 0) {
            return Err(Error::CountMismatch(format!("arm {i}: setting with no photons")));
        }
    }
    Ok(())
}

fn arm_average(values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = values.len() as f64;
    values.sum::<f64>() / n
}

/// Frequencies → expectation values (equal-weight average within each arm)
/// → linear inversion.
pub fn estimate_from_counts(scheme: &Scheme, counts: &CountRecord) -> Result<Bloch> {
    check_shape(scheme, counts)?;
    let m: Vec<f64> = counts
        .arms
        .iter()
        .map(|arm| arm_average(arm.iter().map(Counts::expectation)))
        .collect();
    Ok(estimate(scheme, &ProjectionRecord { m: Vec3::new(m[0], m[1], m[2]) }))
}

/// Infinite-statistics estimate: exact probabilities in place of frequencies.
pub fn estimate_from_probabilities(scheme: &Scheme, probs: &[Vec<f64>]) -> Bloch {
    let m: Vec<f64> = probs
        .iter()
        .map(|arm| arm_average(arm.iter().map(|p| 2.0 * p - 1.0)))
        .collect();
    estimate(scheme, &ProjectionRecord { m: Vec3::new(m[0], m[1], m[2]) })
}

/// Expected `E‖ŝ − E ŝ‖²` from binomial variance alone.
pub fn statistical_floor(scheme: &Scheme, state: &State, err: &DeviceError<f64>, photons_per_arm: u64) -> Result<f64> {
    let probs = outcome_probabilities(scheme, state, err)?;
    let inv = estimate_weights(scheme);
    let mut total = 0.0;
    for (i, arm) in probs.iter().enumerate() {
        let n = arm.len() as f64;
        let per_setting = photons_per_arm as f64 / n;
        // Var of the arm average of n independent 2p−1 estimates.
        let var = arm.iter().map(|p| 4.0 * p * (1.0 - p) / per_setting).sum::<f64>() / (n * n);
        total += var * (0..3).map(|k| inv.m[k][i] * inv.m[k][i]).sum::<f64>();
    }
    Ok(total)
}

fn estimate_weights(scheme: &Scheme) -> Mat3<f64> {
    let cols = [0, 1, 2].map(|i| {
        let mut e = Vec3::zero();
        match i {
            0 => e.x = 1.0,
            1 => e.y = 1.0,
            _ => e.z = 1.0,
        }
        estimate(scheme, &ProjectionRecord { m: e })
    });
    Mat3::from_columns(cols)
}

/// `‖ŝ − s‖²` for one simulated run.
pub fn run_once(cfg: &ExperimentConfig, err: &DeviceError<f64>, rng: &mut ChaCha20Rng) -> Result<f64> {
    let counts = simulate_counts_with(cfg, err, rng)?;
    Ok((estimate_from_counts(&cfg.scheme, &counts)? - cfg.state.s).norm_sq())
}

/// Short label for a scheme built from single or four-setting arms.
pub fn scheme_label(scheme: &Scheme) -> &'static str {
    let lens: Vec<usize> = scheme.arms().iter().map(CompositeMeasurement::len).collect();
    if lens.iter().all(|&l| l == 1) {
        "ncm"
    } else if lens.iter().all(|&l| l == 4) {
        "ecm"
    } else {
        "custom"
    }
}

/// One row of an error sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub channel: ErrorChannel,
    pub epsilon: f64,
    pub scheme: String,
    pub mean_err_sq: f64,
    pub std_err_sq: f64,
    pub runs: usize,
    pub photons: u64,
}

/// Sample mean and (n − 1) standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Runs the simulate → estimate pipeline `cfg.runs` times at every grid
/// value of `channel` (radians, on top of `cfg.err`). Points are evaluated in
/// parallel; output order follows the grid.
pub fn error_sweep(cfg: &ExperimentConfig, channel: ErrorChannel, grid: &[f64]) -> Result<Vec<SweepPoint>> {
    error_sweep_from(cfg, channel, grid, 0)
}

/// [`error_sweep`] with grid point `i` drawing from stream `first_point + i`,
/// so several sweeps can share one master seed without sharing streams.
pub fn error_sweep_from(
    cfg: &ExperimentConfig,
    channel: ErrorChannel,
    grid: &[f64],
    first_point: u32,
) -> Result<Vec<SweepPoint>> {
    if grid.is_empty() || grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::BadGrid);
    }
    cfg.validate()?;
    let label = scheme_label(&cfg.scheme).to_string();
    grid.par_iter()
        .enumerate()
        .map(|(i, &eps)| {
            let err = cfg.err.with(channel, eps);
            let samples = (0..cfg.runs)
                .map(|run| run_once(cfg, &err, &mut rng_for(cfg.seed, first_point + i as u32, run as u32)))
                .collect::<Result<Vec<_>>>()?;
            let (mean_err_sq, std_err_sq) = mean_std(&samples);
            Ok(SweepPoint {
                channel,
                epsilon: eps,
                scheme: label.clone(),
                mean_err_sq,
                std_err_sq,
                runs: cfg.runs,
                photons: cfg.photons_per_arm,
            })
        })
        .collect()
}

/// Mean and std of `‖ŝ − s‖²` over `cfg.runs` runs at `cfg.err`, using
/// stream `point`.
pub fn repeated_runs(cfg: &ExperimentConfig, point: u32) -> Result<(f64, f64)> {
    cfg.validate()?;
    let samples = (0..cfg.runs)
        .map(|run| run_once(cfg, &cfg.err, &mut rng_for(cfg.seed, point, run as u32)))
        .collect::<Result<Vec<_>>>()?;
    Ok(mean_std(&samples))
}
