// SPDX-License-Identifier: Apache-2.0

//! Error-compensation measurement (ECM) design.
//!
//! A composite measurement splits the photons equally over several angle
//! settings that all realize the same ideal measurement vector. The
//! effective vector is the average of the realized vectors, so any channel
//! whose first-order sensitivities sum to zero over the settings drops out
//! to first order.
//!
//! [`ecm4`] builds the four-setting scheme that cancels the HWP axis error
//! and both retardance errors at once. The QWP axis error cannot be
//! cancelled this way, only reduced: its residual sensitivity is
//! `2 U0 r0`, see [`u0`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::error_model::{analytic_partial, realized_vector, DeviceError, ErrorChannel};
use crate::jones::{ideal_vector, BlochVector};
use crate::linalg::{Mat3, Vec3};
use crate::scalar::{four, two, Real};

/// QWP/HWP rotation angles of one setting, radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleSetting<T> {
    pub q: T,
    pub h: T,
}

impl<T: Real> AngleSetting<T> {
    pub fn new(q: T, h: T) -> Self {
        Self { q, h }
    }

    pub fn from_degrees(q_deg: T, h_deg: T) -> Self {
        Self::new(q_deg.to_radians(), h_deg.to_radians())
    }

    /// `t = 2h − q`.
    pub fn t(&self) -> T {
        two::<T>() * self.h - self.q
    }

    pub fn ideal_vector(&self) -> BlochVector<T> {
        ideal_vector(self.q, self.h)
    }

    pub fn realized_vector(&self, err: &DeviceError<T>) -> BlochVector<T> {
        realized_vector(self.q, self.h, err)
    }

    pub fn partial(&self, channel: ErrorChannel) -> Vec3<T> {
        analytic_partial(self.q, self.h, channel)
    }
}

fn composite_tolerance<T: Real>() -> T {
    T::lit(1e-10).max(T::epsilon() * T::lit(256.0))
}

/// Equal-weight average over settings sharing one ideal measurement vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeMeasurement<T> {
    settings: Vec<AngleSetting<T>>,
}

impl<T: Real> CompositeMeasurement<T> {
    /// Fails if `settings` is empty or the ideal vectors disagree by more than 1e-10.
    pub fn new(settings: Vec<AngleSetting<T>>) -> Result<Self> {
        let first = settings.first().ok_or(Error::EmptyComposite)?.ideal_vector();
        let mismatch = settings
            .iter()
            .map(|s| (s.ideal_vector() - first).max_abs())
            .fold(T::zero(), T::max);
        if !(mismatch <= composite_tolerance()) {
            return Err(Error::InconsistentComposite(mismatch.to_f64_lossy()));
        }
        Ok(Self { settings })
    }

    /// Uncompensated measurement: one setting carries all photons.
    pub fn single(setting: AngleSetting<T>) -> Self {
        Self { settings: vec![setting] }
    }

    pub fn settings(&self) -> &[AngleSetting<T>] {
        &self.settings
    }

    pub fn len(&self) -> usize {
        self.settings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.settings.is_empty()
    }

    pub fn weight(&self) -> T {
        T::one() / T::from_usize(self.settings.len()).unwrap()
    }

    /// Shared ideal measurement vector.
    pub fn ideal_vector(&self) -> BlochVector<T> {
        self.settings[0].ideal_vector()
    }

    pub fn to_record(&self) -> CompositeRecord {
        let w = self.weight().to_f64_lossy();
        CompositeRecord {
            ideal_vector: self.ideal_vector().cast::<f64>().to_array(),
            settings_deg: self
                .settings
                .iter()
                .map(|s| SettingDeg {
                    q_deg: s.q.to_f64_lossy().to_degrees(),
                    h_deg: s.h.to_f64_lossy().to_degrees(),
                })
                .collect(),
            weights: vec![w; self.settings.len()],
        }
    }
}

/// Serialized form of a composite measurement; angles in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeRecord {
    pub ideal_vector: [f64; 3],
    pub settings_deg: Vec<SettingDeg>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SettingDeg {
    pub q_deg: f64,
    pub h_deg: f64,
}

impl CompositeRecord {
    pub fn to_composite(&self) -> Result<CompositeMeasurement<f64>> {
        CompositeMeasurement::new(
            self.settings_deg
                .iter()
                .map(|s| AngleSetting::from_degrees(s.q_deg, s.h_deg))
                .collect(),
        )
    }
}

/// The constant matrix with `(1,3) = 1`, `(3,1) = −1`, zero elsewhere.
pub fn u0<T: Real>() -> Mat3<T> {
    let mut m = Mat3::zero();
    m.m[0][2] = T::one();
    m.m[2][0] = -T::one();
    m
}

/// Second setting that, paired with `setting`, realizes the same ideal vector
/// and cancels the first-order sensitivity on `channel`.
///
/// HWP axis and QWP retardance share the family
/// `(q + (k + ½)π, q − h + k′π/2)`; HWP retardance uses `(q + kπ, h + (k′ + ½)π)`.
/// The QWP axis channel has no such partner in general and is rejected.
pub fn compensating_pair<T: Real>(
    setting: AngleSetting<T>,
    channel: ErrorChannel,
    k: i64,
    k_prime: i64,
) -> Result<AngleSetting<T>> {
    let pi = T::PI();
    let half = T::lit(0.5);
    let k = T::from_i64(k).unwrap();
    let kp = T::from_i64(k_prime).unwrap();
    match channel {
        ErrorChannel::HAxis | ErrorChannel::QPhase => Ok(AngleSetting::new(
            setting.q + (k + half) * pi,
            setting.q - setting.h + kp * pi / two::<T>(),
        )),
        ErrorChannel::HPhase => Ok(AngleSetting::new(setting.q + k * pi, setting.h + (kp + half) * pi)),
        ErrorChannel::QAxis => Err(Error::NotCompensable(channel)),
    }
}

/// Four-setting ECM seeded by `(q1, h1)`:
/// `(q1, h1)`, `(q1 + π/2, q1 − h1)`, `(q1, h1 + π/2)`, `(q1 + π/2, q1 − h1 + π/2)`.
///
/// Angles are not reduced modulo π.
pub fn ecm4<T: Real>(seed: AngleSetting<T>) -> CompositeMeasurement<T> {
    let half_pi = T::FRAC_PI_2();
    let (q1, h1) = (seed.q, seed.h);
    let q2 = q1 + half_pi;
    let h2 = q1 - h1;
    CompositeMeasurement {
        settings: vec![
            seed,
            AngleSetting::new(q2, h2),
            AngleSetting::new(q1, h1 + half_pi),
            AngleSetting::new(q2, h2 + half_pi),
        ],
    }
}

/// Average of the realized vectors over the composite's settings.
pub fn effective_vector<T: Real>(cm: &CompositeMeasurement<T>, err: &DeviceError<T>) -> BlochVector<T> {
    let sum = cm
        .settings
        .iter()
        .fold(Vec3::zero(), |acc, s| acc + s.realized_vector(err));
    sum * cm.weight()
}

/// First-order sensitivity of the effective vector on `channel`.
pub fn summed_sensitivity<T: Real>(cm: &CompositeMeasurement<T>, channel: ErrorChannel) -> Vec3<T> {
    let sum = cm
        .settings
        .iter()
        .fold(Vec3::zero(), |acc, s| acc + s.partial(channel));
    sum * cm.weight()
}

/// `‖∂r_e/∂ε_q‖²` for a composite; for [`ecm4`] output this equals `4(1 − r_y²)`.
pub fn residual_q_norm_sq<T: Real>(cm: &CompositeMeasurement<T>) -> T {
    summed_sensitivity(cm, ErrorChannel::QAxis).norm_sq()
}

/// `‖∂r/∂ε_q‖² = 4(2 − r_y²)` for a single uncompensated setting.
pub fn single_q_norm_sq<T: Real>(setting: AngleSetting<T>) -> T {
    setting.partial(ErrorChannel::QAxis).norm_sq()
}

/// The σx, σy, σz settings used for Pauli tomography, radians.
pub fn pauli_settings<T: Real>() -> [AngleSetting<T>; 3] {
    let d = |x: f64| T::lit(x.to_radians());
    [
        AngleSetting::new(d(45.0), d(22.5)),
        AngleSetting::new(d(0.0), d(22.5)),
        AngleSetting::new(d(0.0), d(0.0)),
    ]
}

/// Total squared QWP-axis sensitivity over the three Pauli measurements,
/// `(with ECM, without)`. Any orthonormal triple gives `(8, 20)`.
pub fn mub_q_sensitivity_totals<T: Real>() -> (T, T) {
    pauli_settings::<T>().iter().fold((T::zero(), T::zero()), |(e, n), &s| {
        (e + residual_q_norm_sq(&ecm4(s)), n + single_q_norm_sq(s))
    })
}

/// Residual of the six conditions a pair of settings must meet to cancel the
/// QWP axis error: largest absolute mismatch. Zero means a compensating pair.
pub fn q_axis_pair_residual<T: Real>(a: AngleSetting<T>, b: AngleSetting<T>) -> T {
    let ta = q_axis_pair_terms(a);
    let tb = q_axis_pair_terms(b);
    q_axis_residual_from_terms(&ta, &tb)
}

/// `[sin2t, cos2t, sin2q, cos2q, cos(4h−4q), sin(4h−4q)]`.
fn q_axis_pair_terms<T: Real>(s: AngleSetting<T>) -> [T; 6] {
    let t2 = two::<T>();
    let (s2t, c2t) = (t2 * s.t()).sin_cos();
    let (s2q, c2q) = (t2 * s.q).sin_cos();
    let (s4, c4) = (four::<T>() * (s.h - s.q)).sin_cos();
    [s2t, c2t, s2q, c2q, c4, s4]
}

fn q_axis_residual_from_terms<T: Real>(a: &[T; 6], b: &[T; 6]) -> T {
    // First term must match, the rest must flip sign.
    let mut r = (a[0] - b[0]).abs();
    for i in 1..6 {
        r = r.max((a[i] + b[i]).abs());
    }
    r
}

/// Outcome of a grid search for a QWP-axis compensating partner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeOutcome {
    pub seed: AngleSetting<f64>,
    pub best: AngleSetting<f64>,
    pub residual: f64,
}

impl ProbeOutcome {
    pub fn is_hit(&self, threshold: f64) -> bool {
        self.residual < threshold
    }
}

/// Exhaustive `n × n` grid over `(q2, h2) ∈ [0, π)²` for the QWP-axis
/// compensation conditions. The trigonometric table is built once and
/// reused across seeds.
pub struct QAxisPairSearch {
    n: usize,
    terms: Vec<[f64; 6]>,
}

impl QAxisPairSearch {
    pub fn new(n: usize) -> Self {
        let step = std::f64::consts::PI / n as f64;
        let mut terms = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                terms.push(q_axis_pair_terms(AngleSetting::new(i as f64 * step, j as f64 * step)));
            }
        }
        Self { n, terms }
    }

    pub fn probe(&self, seed: AngleSetting<f64>) -> ProbeOutcome {
        let target = q_axis_pair_terms(seed);
        let (idx, residual) = self
            .terms
            .iter()
            .map(|t| q_axis_residual_from_terms(&target, t))
            .enumerate()
            .fold((0, f64::INFINITY), |best, (i, r)| if r < best.1 { (i, r) } else { best });
        let step = std::f64::consts::PI / self.n as f64;
        ProbeOutcome {
            seed,
            best: AngleSetting::new((idx / self.n) as f64 * step, (idx % self.n) as f64 * step),
            residual,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn deg(x: f64) -> f64 {
        x.to_radians()
    }

    fn assert_setting_deg(s: AngleSetting<f64>, q: f64, h: f64) {
        assert!((s.q.to_degrees() - q).abs() < 1e-10, "q {} vs {q}", s.q.to_degrees());
        assert!((s.h.to_degrees() - h).abs() < 1e-10, "h {} vs {h}", s.h.to_degrees());
    }

    #[test]
    fn pair_examples() {
        let seed = AngleSetting::from_degrees(30.0, 13.0);
        assert_setting_deg(compensating_pair(seed, ErrorChannel::HAxis, 0, 0).unwrap(), 120.0, 17.0);
        assert_setting_deg(compensating_pair(seed, ErrorChannel::HPhase, 0, 0).unwrap(), 30.0, 103.0);
        assert_eq!(
            compensating_pair(seed, ErrorChannel::QAxis, 0, 0),
            Err(Error::NotCompensable(ErrorChannel::QAxis))
        );

        let other = compensating_pair(seed, ErrorChannel::HAxis, 0, 0).unwrap();
        let sum = seed.partial(ErrorChannel::HAxis) + other.partial(ErrorChannel::HAxis);
        assert!(sum.max_abs() < 1e-12);
    }

    #[test]
    fn ecm4_example_settings() {
        let cm = ecm4(AngleSetting::from_degrees(30.0, 13.0));
        let want = [(30.0, 13.0), (120.0, 17.0), (30.0, 103.0), (120.0, 107.0)];
        for (s, (q, h)) in cm.settings().iter().zip(want) {
            assert_setting_deg(*s, q, h);
        }
        let cm = ecm4(AngleSetting::from_degrees(45.0, 22.5));
        assert!((cm.ideal_vector() - Vec3::new(1.0, 0.0, 0.0)).max_abs() < 1e-15);
    }

    #[test]
    fn effective_vector_limits() {
        let cm = ecm4(AngleSetting::new(0.3, -0.2));
        let r = effective_vector(&cm, &DeviceError::ideal());
        assert!((r - cm.ideal_vector()).max_abs() < 1e-15);

        let s = AngleSetting::new(0.3, -0.2);
        let err = DeviceError::new(0.01, -0.02, 0.03, 0.04);
        assert_eq!(effective_vector(&CompositeMeasurement::single(s), &err), s.realized_vector(&err));
        assert_eq!(
            summed_sensitivity(&CompositeMeasurement::single(s), ErrorChannel::QPhase),
            s.partial(ErrorChannel::QPhase)
        );
    }

    #[test]
    fn residual_examples() {
        assert!(residual_q_norm_sq(&ecm4(AngleSetting::from_degrees(0.0, 22.5))) < 1e-24);
        assert!((residual_q_norm_sq(&ecm4(AngleSetting::from_degrees(0.0f64, 0.0))) - 4.0).abs() < 1e-12);
        // t1 = −4°, so r_y = sin(−8°).
        let want = 4.0 * (1.0 - deg(-8.0).sin().powi(2));
        let got = residual_q_norm_sq(&ecm4(AngleSetting::from_degrees(30.0, 13.0)));
        assert!((got - want).abs() < 1e-12);
        assert!((got - 3.9225).abs() < 1e-4);
    }

    #[test]
    fn mub_totals() {
        let (e, n) = mub_q_sensitivity_totals::<f64>();
        assert!((e - 8.0).abs() < 1e-12);
        assert!((n - 20.0).abs() < 1e-12);
        assert!((e / n - 0.4).abs() < 1e-12);
    }

    #[test]
    fn inconsistent_composite_is_rejected() {
        let bad = vec![AngleSetting::new(0.0, 0.0), AngleSetting::new(0.1, 0.0)];
        assert!(matches!(CompositeMeasurement::new(bad), Err(Error::InconsistentComposite(_))));
        assert_eq!(CompositeMeasurement::<f64>::new(vec![]), Err(Error::EmptyComposite));
        let ok = ecm4(AngleSetting::new(0.7, 0.1)).settings().to_vec();
        assert!(CompositeMeasurement::new(ok).is_ok());
    }

    #[test]
    fn record_round_trip() {
        let cm = ecm4(AngleSetting::from_degrees(30.0, 13.0));
        let rec = cm.to_record();
        assert_eq!(rec.weights, vec![0.25; 4]);
        let json = serde_json::to_string(&rec).unwrap();
        let back: CompositeRecord = serde_json::from_str(&json).unwrap();
        let cm2 = back.to_composite().unwrap();
        for (a, b) in cm.settings().iter().zip(cm2.settings()) {
            assert!((a.q - b.q).abs() < 1e-14 && (a.h - b.h).abs() < 1e-14);
        }
    }

    #[test]
    fn u0_structure() {
        let u = u0::<f64>();
        assert_eq!(u.transpose().m, {
            let mut m = u.m;
            for row in &mut m {
                for v in row {
                    *v = -*v;
                }
            }
            m
        });
        let sq = u.mul_mat(&u);
        assert_eq!(sq.mul_vec(Vec3::new(1.0, 0.0, 0.0)), Vec3::new(-1.0, 0.0, 0.0));
        assert_eq!(sq.mul_vec(Vec3::new(0.0, 0.0, 1.0)), Vec3::new(0.0, 0.0, -1.0));
        assert_eq!(sq.mul_vec(Vec3::new(0.0, 1.0, 0.0)), Vec3::zero());
    }

    #[test]
    fn q_axis_pair_exists_only_on_the_y_axis() {
        // t1 = π/4 makes r0 = (0, 1, 0); the compensating partner then also
        // cancels the QWP axis error.
        let seed = AngleSetting::new(0.0, std::f64::consts::PI / 8.0);
        let partner = compensating_pair(seed, ErrorChannel::HAxis, 0, 0).unwrap();
        assert!(q_axis_pair_residual(seed, partner) < 1e-12);
        let sum = seed.partial(ErrorChannel::QAxis) + partner.partial(ErrorChannel::QAxis);
        assert!(sum.max_abs() < 1e-12);

        let generic = AngleSetting::from_degrees(30.0, 13.0);
        let search = QAxisPairSearch::new(181);
        assert!(search.probe(generic).residual > 0.1);
    }

    proptest! {
        #[test]
        fn ecm4_cancels_three_channels(q in -4.0f64..4.0, h in -4.0f64..4.0) {
            let seed = AngleSetting::new(q, h);
            let cm = ecm4(seed);
            let r0 = seed.ideal_vector();
            for s in cm.settings() {
                prop_assert!((s.ideal_vector() - r0).max_abs() < 1e-12);
            }
            for c in ErrorChannel::COMPENSABLE {
                prop_assert!(summed_sensitivity(&cm, c).max_abs() < 1e-12);
            }
            let q_sens = summed_sensitivity(&cm, ErrorChannel::QAxis);
            prop_assert!((q_sens - u0::<f64>().mul_vec(r0) * 2.0).max_abs() < 1e-12);
        }

        #[test]
        fn ecm4_pairwise_structure(q in -4.0f64..4.0, h in -4.0f64..4.0) {
            let cm = ecm4(AngleSetting::new(q, h));
            let s = cm.settings();
            for (a, b) in [(0, 1), (2, 3)] {
                for c in [ErrorChannel::HAxis, ErrorChannel::QPhase] {
                    prop_assert!((s[a].partial(c) + s[b].partial(c)).max_abs() < 1e-12);
                }
            }
            for (a, b) in [(0, 2), (1, 3)] {
                prop_assert!((s[a].partial(ErrorChannel::HPhase) + s[b].partial(ErrorChannel::HPhase)).max_abs() < 1e-12);
            }
        }

        #[test]
        fn q_residual_at_most_half_of_single(q in -4.0f64..4.0, h in -4.0f64..4.0) {
            let seed = AngleSetting::new(q, h);
            let ry = seed.ideal_vector().y;
            let ecm = residual_q_norm_sq(&ecm4(seed));
            let single = single_q_norm_sq(seed);
            prop_assert!((ecm - 4.0 * (1.0 - ry * ry)).abs() < 1e-12);
            prop_assert!((single - 4.0 * (2.0 - ry * ry)).abs() < 1e-12);
            prop_assert!(ecm <= 0.5 * single + 1e-12);
        }

        #[test]
        fn compensating_pairs_hold_for_all_branches(
            q in -4.0f64..4.0, h in -4.0f64..4.0, k in -3i64..3, kp in -3i64..3,
        ) {
            let seed = AngleSetting::new(q, h);
            for c in ErrorChannel::COMPENSABLE {
                let other = compensating_pair(seed, c, k, kp).unwrap();
                prop_assert!((other.ideal_vector() - seed.ideal_vector()).max_abs() < 1e-12);
                prop_assert!((other.partial(c) + seed.partial(c)).max_abs() < 1e-12);
            }
        }
    }
}
