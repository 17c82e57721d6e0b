// SPDX-License-Identifier: Apache-2.0

//! Linear-inversion qubit tomography and its systematic error under device
//! imperfections.
//!
//! Three arms measure the projections `m_i = r_i . s`; the estimator is
//! `ŝ = (R0ᵀ)⁻¹ m` where `R0` holds the ideal measurement vectors as columns.
//! With an imperfect device each arm actually realizes `r_i` (or the average
//! `r_e` for a composite arm) and the estimate picks up the bias
//! `Δs = (R0ᵀ)⁻¹ (R − R0)ᵀ s`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ecm::{ecm4, effective_vector, pauli_settings, AngleSetting, CompositeMeasurement};
use crate::error::{Error, Result};
use crate::error_model::{geometric_grid, DeviceError, ErrorChannel};
use crate::jones::BlochVector;
use crate::linalg::{Mat3, Vec3};
use crate::scalar::{four, two, Real};

/// Smallest `|det R0|` accepted for an invertible scheme.
pub const MIN_SCHEME_DET: f64 = 1e-6;

/// Deviation sizes (radians) used by [`fit_quadratic_coefficient`].
pub const FIT_EPSILONS: [f64; 3] = [5e-4, 1e-3, 2e-3];

/// Qubit state `ρ = (1 + s.σ)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitState<T> {
    pub s: BlochVector<T>,
}

impl<T: Real> QubitState<T> {
    /// Fails if `‖s‖ > 1 + 1e-12`.
    pub fn new(s: BlochVector<T>) -> Result<Self> {
        let limit = T::one() + T::lit(1e-12).max(T::epsilon() * T::lit(4.0));
        if !(s.norm() <= limit) {
            return Err(Error::InvalidConfig(format!(
                "Bloch vector norm {} exceeds 1",
                s.norm().to_f64_lossy()
            )));
        }
        Ok(Self { s })
    }

    pub fn maximally_mixed() -> Self {
        Self { s: Vec3::zero() }
    }

    /// `(0.346, −0.446, 0.425)`, a generic state of length ≈ 0.707.
    pub fn s1() -> Self {
        Self { s: Vec3::new(T::lit(0.346), T::lit(-0.446), T::lit(0.425)) }
    }

    /// `(0, 0.707, 0)`, along the y axis.
    pub fn s2() -> Self {
        Self { s: Vec3::new(T::zero(), T::lit(0.707), T::zero()) }
    }
}

/// No compensation (one setting per arm) or the four-setting ECM per arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Ncm,
    Ecm,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Self::Ncm => "ncm",
            Self::Ecm => "ecm",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "ncm" => Ok(Self::Ncm),
            "ecm" => Ok(Self::Ecm),
            other => Err(format!("unknown scheme `{other}` (expected ncm or ecm)")),
        }
    }
}

/// Three measurement arms and the ideal matrix `R0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TomographyScheme<T> {
    arms: [CompositeMeasurement<T>; 3],
    r0: Mat3<T>,
    r0t_inv: Mat3<T>,
}

impl<T: Real> TomographyScheme<T> {
    /// Fails with [`Error::SingularScheme`] when `|det R0| <= 1e-6`.
    pub fn new(arms: [CompositeMeasurement<T>; 3]) -> Result<Self> {
        let r0 = Mat3::from_columns([arms[0].ideal_vector(), arms[1].ideal_vector(), arms[2].ideal_vector()]);
        let r0t_inv = r0
            .transpose()
            .inverse(T::lit(MIN_SCHEME_DET))
            .ok_or_else(|| Error::SingularScheme(r0.det().abs().to_f64_lossy()))?;
        Ok(Self { arms, r0, r0t_inv })
    }

    /// Scheme with one arm per seed setting, wrapped according to `mode`.
    pub fn from_seeds(mode: Mode, seeds: [AngleSetting<T>; 3]) -> Result<Self> {
        Self::new(seeds.map(|s| match mode {
            Mode::Ncm => CompositeMeasurement::single(s),
            Mode::Ecm => ecm4(s),
        }))
    }

    pub fn arms(&self) -> &[CompositeMeasurement<T>; 3] {
        &self.arms
    }

    pub fn r0(&self) -> &Mat3<T> {
        &self.r0
    }

    pub fn total_settings(&self) -> usize {
        self.arms.iter().map(|a| a.len()).sum()
    }

    /// `R`: the effective measurement vectors actually realized, as columns.
    pub fn realized_matrix(&self, err: &DeviceError<T>) -> Mat3<T> {
        Mat3::from_columns([
            effective_vector(&self.arms[0], err),
            effective_vector(&self.arms[1], err),
            effective_vector(&self.arms[2], err),
        ])
    }

    /// Noise-free expectation values each arm reports for state `s`.
    pub fn projections(&self, s: &QubitState<T>, err: &DeviceError<T>) -> ProjectionRecord<T> {
        ProjectionRecord { m: self.realized_matrix(err).transpose().mul_vec(s.s) }
    }
}

/// σx/σy/σz tomography; `R0` is the identity.
pub fn pauli_scheme<T: Real>(mode: Mode) -> TomographyScheme<T> {
    TomographyScheme::from_seeds(mode, pauli_settings()).expect("Pauli scheme is invertible")
}

/// Expectation value measured on each arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionRecord<T> {
    pub m: Vec3<T>,
}

/// `ŝ = (R0ᵀ)⁻¹ m`. No projection onto the Bloch ball is applied, so the
/// estimate may have norm above one.
pub fn estimate<T: Real>(scheme: &TomographyScheme<T>, m: &ProjectionRecord<T>) -> BlochVector<T> {
    scheme.r0t_inv.mul_vec(m.m)
}

/// Exact estimator bias `(R0ᵀ)⁻¹ (R − R0)ᵀ s`, no Taylor truncation.
pub fn systematic_error_exact<T: Real>(
    scheme: &TomographyScheme<T>,
    s: &QubitState<T>,
    err: &DeviceError<T>,
) -> Vec3<T> {
    let diff = scheme.realized_matrix(err).sub(&scheme.r0);
    scheme.r0t_inv.mul_vec(diff.transpose().mul_vec(s.s))
}

/// Coefficients of `‖Δs‖² ≈ Σ c_ξ ε_ξ²` for the uncompensated Pauli scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NcmCoefficients<T> {
    pub h: T,
    pub dh: T,
    pub dq: T,
    pub q: T,
}

impl<T: Real> NcmCoefficients<T> {
    pub fn get(&self, channel: ErrorChannel) -> T {
        match channel {
            ErrorChannel::QAxis => self.q,
            ErrorChannel::HAxis => self.h,
            ErrorChannel::QPhase => self.dq,
            ErrorChannel::HPhase => self.dh,
        }
    }
}

pub fn ncm_quadratic_coefficients<T: Real>(state: &QubitState<T>) -> NcmCoefficients<T> {
    let Vec3 { x, y, z } = state.s;
    let (t2, t4) = (two::<T>(), four::<T>());
    let half = T::lit(0.5);
    NcmCoefficients {
        h: T::lit(32.0) * y * y + T::lit(16.0) * z * z,
        dh: half * (x * x + z * z),
        dq: x * x,
        q: t4 * (x * x + t2 * y * y + t2 * z * z + t2 * y * z - t2 * x * y),
    }
}

/// `4(s_x² + s_z²)`: the ECM bias is quadratic only in the QWP axis error,
/// with this coefficient whatever the measurement directions.
pub fn ecm_quadratic_coefficient<T: Real>(state: &QubitState<T>) -> T {
    four::<T>() * (state.s.x * state.s.x + state.s.z * state.s.z)
}

/// Second-order error per channel, assuming independent channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelBudget<T> {
    pub h: T,
    pub q: T,
    pub dq: T,
    pub dh: T,
}

impl<T: Real> ChannelBudget<T> {
    pub fn total(&self) -> T {
        self.h + self.q + self.dq + self.dh
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudget<T> {
    pub ncm: ChannelBudget<T>,
    pub ncm_total: T,
    pub ecm_total: T,
}

/// Predicted `‖Δs‖²` at second order for both schemes. `magnitudes` holds
/// the (nonnegative) deviation size per channel.
pub fn predicted_error_budget<T: Real>(state: &QubitState<T>, magnitudes: &DeviceError<T>) -> Result<ErrorBudget<T>> {
    if ErrorChannel::ALL.iter().any(|&c| !(magnitudes.get(c) >= T::zero())) {
        return Err(Error::InvalidConfig("error magnitudes must be nonnegative".into()));
    }
    let c = ncm_quadratic_coefficients(state);
    let sq = |x: T| x * x;
    let ncm = ChannelBudget {
        h: c.h * sq(magnitudes.eps_h),
        q: c.q * sq(magnitudes.eps_q),
        dq: c.dq * sq(magnitudes.eps_dq),
        dh: c.dh * sq(magnitudes.eps_dh),
    };
    Ok(ErrorBudget {
        ncm,
        ncm_total: ncm.total(),
        ecm_total: ecm_quadratic_coefficient(state) * sq(magnitudes.eps_q),
    })
}

/// Second-order coefficient of `‖Δs‖²` along one channel, fitted from
/// [`systematic_error_exact`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFit<T> {
    /// Quadratic through `‖Δs‖²/ε²` at [`FIT_EPSILONS`], extrapolated to ε = 0.
    pub three_point: T,
    /// Least-squares quadratic through `‖Δs‖²/ε²` on a geometric grid over
    /// `[1e-4, 1e-2]`, value at zero.
    pub least_squares: T,
}

impl<T: Real> QuadraticFit<T> {
    /// Whether the two estimates agree within `rel` (with an absolute floor
    /// for vanishing coefficients).
    pub fn consistent(&self, rel: T, abs_floor: T) -> bool {
        let scale = self.three_point.abs().max(self.least_squares.abs());
        (self.three_point - self.least_squares).abs() <= (rel * scale).max(abs_floor)
    }
}

pub fn fit_quadratic_coefficient<T: Real>(
    scheme: &TomographyScheme<T>,
    state: &QubitState<T>,
    channel: ErrorChannel,
) -> QuadraticFit<T> {
    let ratio = |eps: T| {
        systematic_error_exact(scheme, state, &DeviceError::along(channel, eps)).norm_sq() / (eps * eps)
    };

    let xs = FIT_EPSILONS.map(T::lit);
    let gs = xs.map(ratio);
    // Lagrange interpolation evaluated at zero.
    let mut three_point = T::zero();
    for i in 0..3 {
        let mut w = T::one();
        for j in 0..3 {
            if i != j {
                w = w * (-xs[j]) / (xs[i] - xs[j]);
            }
        }
        three_point = three_point + w * gs[i];
    }

    // Least squares for c2 + c3 ε + c4 ε², in units of the largest ε.
    let (lo, hi) = (T::lit(1e-4), T::lit(1e-2));
    let grid = geometric_grid(lo, hi, 9);
    let mut normal = Mat3::zero();
    let mut rhs = Vec3::zero();
    for &e in &grid {
        let x = e / hi;
        let basis = [T::one(), x, x * x];
        let g = ratio(e);
        for i in 0..3 {
            for j in 0..3 {
                normal.m[i][j] = normal.m[i][j] + basis[i] * basis[j];
            }
        }
        rhs += Vec3::from_array(basis) * g;
    }
    let least_squares = normal
        .inverse(T::zero())
        .map(|inv| inv.mul_vec(rhs).x)
        .unwrap_or_else(T::nan);

    QuadraticFit { three_point, least_squares }
}
