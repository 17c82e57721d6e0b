// SPDX-License-Identifier: Apache-2.0

//! Device imperfections and the sensitivities of the realized measurement
//! vector to each of them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jones::{ideal_vector, measured_bloch_general, BlochVector};
use crate::linalg::Vec3;
use crate::scalar::{four, two, Real};

/// Default central-difference step, radians.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// One of the four independent ways the device can deviate from ideal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ErrorChannel {
    /// QWP optic-axis deviation.
    #[serde(rename = "q")]
    QAxis,
    /// HWP optic-axis deviation.
    #[serde(rename = "h")]
    HAxis,
    /// QWP retardance deviation.
    #[serde(rename = "dq")]
    QPhase,
    /// HWP retardance deviation.
    #[serde(rename = "dh")]
    HPhase,
}

impl ErrorChannel {
    pub const ALL: [ErrorChannel; 4] = [Self::QAxis, Self::HAxis, Self::QPhase, Self::HPhase];

    /// The three channels a four-setting composite cancels to first order.
    pub const COMPENSABLE: [ErrorChannel; 3] = [Self::HAxis, Self::QPhase, Self::HPhase];

    pub fn name(self) -> &'static str {
        match self {
            Self::QAxis => "q",
            Self::HAxis => "h",
            Self::QPhase => "dq",
            Self::HPhase => "dh",
        }
    }

    pub fn is_phase(self) -> bool {
        matches!(self, Self::QPhase | Self::HPhase)
    }
}

impl fmt::Display for ErrorChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ErrorChannel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "q" | "q-axis" | "eps-q" => Ok(Self::QAxis),
            "h" | "h-axis" | "eps-h" => Ok(Self::HAxis),
            "dq" | "q-phase" | "eps-dq" => Ok(Self::QPhase),
            "dh" | "h-phase" | "eps-dh" => Ok(Self::HPhase),
            other => Err(format!("unknown error channel `{other}` (expected q, h, dq or dh)")),
        }
    }
}

/// Deviations of the two plates from their nominal axis angles and
/// retardances (90° and 180°), radians. Constant across angle settings.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DeviceError<T> {
    pub eps_q: T,
    pub eps_h: T,
    pub eps_dq: T,
    pub eps_dh: T,
}

impl<T: Real> DeviceError<T> {
    pub fn ideal() -> Self {
        Self { eps_q: T::zero(), eps_h: T::zero(), eps_dq: T::zero(), eps_dh: T::zero() }
    }

    pub fn new(eps_q: T, eps_h: T, eps_dq: T, eps_dh: T) -> Self {
        Self { eps_q, eps_h, eps_dq, eps_dh }
    }

    /// A single deviation of size `eps` on `channel`.
    pub fn along(channel: ErrorChannel, eps: T) -> Self {
        Self::ideal().with(channel, eps)
    }

    /// Same angle error on both axes and same phase error on both plates.
    pub fn uniform(angle: T, phase: T) -> Self {
        Self::new(angle, angle, phase, phase)
    }

    /// Correlated retardance shift, e.g. from a wavelength detuning that
    /// moves both plates off their design retardance.
    pub fn dispersion(dq: T, dh: T) -> Self {
        Self::new(T::zero(), T::zero(), dq, dh)
    }

    pub fn get(&self, channel: ErrorChannel) -> T {
        match channel {
            ErrorChannel::QAxis => self.eps_q,
            ErrorChannel::HAxis => self.eps_h,
            ErrorChannel::QPhase => self.eps_dq,
            ErrorChannel::HPhase => self.eps_dh,
        }
    }

    pub fn with(mut self, channel: ErrorChannel, eps: T) -> Self {
        match channel {
            ErrorChannel::QAxis => self.eps_q = eps,
            ErrorChannel::HAxis => self.eps_h = eps,
            ErrorChannel::QPhase => self.eps_dq = eps,
            ErrorChannel::HPhase => self.eps_dh = eps,
        }
        self
    }

    pub fn is_ideal(&self) -> bool {
        ErrorChannel::ALL.iter().all(|&c| self.get(c) == T::zero())
    }
}

/// Measurement vector actually realized at setting `(q, h)` by the imperfect device.
pub fn realized_vector<T: Real>(q: T, h: T, err: &DeviceError<T>) -> BlochVector<T> {
    measured_bloch_general(
        q + err.eps_q,
        T::FRAC_PI_2() + err.eps_dq,
        h + err.eps_h,
        T::PI() + err.eps_dh,
    )
}

/// First-order sensitivity `∂r/∂ε` at `ε = 0`, closed form.
pub fn analytic_partial<T: Real>(q: T, h: T, channel: ErrorChannel) -> Vec3<T> {
    let t2 = two::<T>();
    let t = t2 * h - q;
    let (s2q, c2q) = (t2 * q).sin_cos();
    let (s2t, c2t) = (t2 * t).sin_cos();
    match channel {
        ErrorChannel::HAxis => Vec3::new(-s2q * s2t, c2t, -c2q * s2t) * four::<T>(),
        ErrorChannel::QPhase => Vec3::new(-c2q * s2t, T::zero(), s2q * s2t),
        ErrorChannel::HPhase => {
            let s2h = (t2 * h).sin();
            Vec3::new(-c2q * s2h, T::zero(), s2q * s2h)
        }
        ErrorChannel::QAxis => {
            let (s, c) = (four::<T>() * (h - q)).sin_cos();
            Vec3::new(c, -c2t, s) * t2
        }
    }
}

/// Central-difference sensitivity along one channel; the oracle for
/// [`analytic_partial`]. `step` must lie in `[1e-8, 1e-2]`.
pub fn fd_partial<T: Real>(q: T, h: T, channel: ErrorChannel, step: T) -> Result<Vec3<T>> {
    if !(step >= T::lit(1e-8) && step <= T::lit(1e-2)) {
        return Err(Error::StepOutOfRange { step: step.to_f64_lossy() });
    }
    let plus = realized_vector(q, h, &DeviceError::along(channel, step));
    let minus = realized_vector(q, h, &DeviceError::along(channel, -step));
    Ok((plus - minus) / (two::<T>() * step))
}

/// `realized_vector − ideal_vector`.
pub fn deviation<T: Real>(q: T, h: T, err: &DeviceError<T>) -> Vec3<T> {
    realized_vector(q, h, err) - ideal_vector(q, h)
}

/// Unweighted least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope<T: Real>(xs: &[T], ys: &[T]) -> Result<T> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::TooFewSamples(xs.len().min(ys.len())));
    }
    if ys.iter().any(|&y| !(y > T::zero()) || !y.is_finite()) || xs.iter().any(|&x| !(x > T::zero())) {
        return Err(Error::DegenerateFit);
    }
    let n = T::from_usize(xs.len()).unwrap();
    let lx: Vec<T> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<T> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().fold(T::zero(), |a, &b| a + b) / n;
    let my = ly.iter().fold(T::zero(), |a, &b| a + b) / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (&x, &y) in lx.iter().zip(&ly) {
        sxy = sxy + (x - mx) * (y - my);
        sxx = sxx + (x - mx) * (x - mx);
    }
    if sxx == T::zero() {
        return Err(Error::DegenerateFit);
    }
    Ok(sxy / sxx)
}

/// `samples` geometrically spaced points covering `[min, max]`.
pub fn geometric_grid<T: Real>(min: T, max: T, samples: usize) -> Vec<T> {
    if samples == 1 {
        return vec![min];
    }
    let (lo, hi) = (min.ln(), max.ln());
    let last = T::from_usize(samples - 1).unwrap();
    (0..samples)
        .map(|i| (lo + (hi - lo) * T::from_usize(i).unwrap() / last).exp())
        .collect()
}

/// Log-log slope of an error norm as a function of the deviation size.
///
/// Returns ~1 for first-order (uncompensated) behavior and ~2 once the
/// linear term has been cancelled. `range` must be positive and span at
/// least a decade; at least 8 samples are taken.
pub fn scaling_exponent<T, F>(family: F, range: (T, T), samples: usize) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    let (min, max) = range;
    if samples < 8 {
        return Err(Error::TooFewSamples(samples));
    }
    if !(min > T::zero() && max >= min * T::lit(10.0)) || !max.is_finite() {
        return Err(Error::BadFitRange { min: min.to_f64_lossy(), max: max.to_f64_lossy() });
    }
    let xs = geometric_grid(min, max, samples);
    let ys: Vec<T> = xs.iter().map(|&x| family(x)).collect();
    if ys.iter().all(|&y| !(y.abs() >= T::lit(1e-14))) {
        return Err(Error::DegenerateFit);
    }
    log_log_slope(&xs, &ys)
}
