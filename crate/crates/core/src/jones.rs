// SPDX-License-Identifier: Apache-2.0

//! Jones calculus for the QWP + HWP + PBS measurement device.
//!
//! A measurement setting is the pair of optic-axis angles `(q, h)` of the
//! quarter- and half-wave plates. The device maps `|H>` through both plates;
//! the Bloch vector of the resulting state is the measurement vector, i.e.
//! the direction `r` for which the PBS realizes `r . sigma`.
//!
//! Angles are radians. The wave-plate matrix carries no symmetrized global
//! phase, so Jones vectors can be compared componentwise up to the overall
//! phase picked up through the two plates.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Vec3;
use crate::scalar::{four, two, Real};

/// Bloch vector of a state or measurement direction.
pub type BlochVector<T> = Vec3<T>;

/// Pure polarization state `aH |H> + aV |V>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JonesVector<T> {
    pub h: Complex<T>,
    pub v: Complex<T>,
}

impl<T: Real> JonesVector<T> {
    pub fn new(h: Complex<T>, v: Complex<T>) -> Self {
        Self { h, v }
    }

    pub fn horizontal() -> Self {
        Self::new(Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero()))
    }

    pub fn vertical() -> Self {
        Self::new(Complex::new(T::zero(), T::zero()), Complex::new(T::one(), T::zero()))
    }

    pub fn norm_sq(&self) -> T {
        self.h.norm_sqr() + self.v.norm_sqr()
    }

    /// `|<self|other>|`, which is 1 exactly when the two agree up to global phase.
    pub fn overlap(&self, other: &Self) -> T {
        (self.h.conj() * other.h + self.v.conj() * other.v).norm()
    }
}

/// Row-major 2x2 complex transfer matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JonesMatrix<T> {
    pub m: [[Complex<T>; 2]; 2],
}

impl<T: Real> JonesMatrix<T> {
    pub fn identity() -> Self {
        let (o, z) = (Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero()));
        Self { m: [[o, z], [z, o]] }
    }

    pub fn apply(&self, psi: &JonesVector<T>) -> JonesVector<T> {
        JonesVector::new(
            self.m[0][0] * psi.h + self.m[0][1] * psi.v,
            self.m[1][0] * psi.h + self.m[1][1] * psi.v,
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        let e = |i: usize, j: usize| self.m[i][0] * o.m[0][j] + self.m[i][1] * o.m[1][j];
        Self { m: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]] }
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self { m: [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]] }
    }

    pub fn max_abs_diff(&self, o: &Self) -> T {
        let mut best = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                best = best.max((self.m[i][j] - o.m[i][j]).norm());
            }
        }
        best
    }
}

/// A linear retarder: optic axis at `theta` from horizontal, retardance `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavePlate<T> {
    pub theta: T,
    pub delta: T,
}

impl<T: Real> WavePlate<T> {
    pub fn new(theta: T, delta: T) -> Self {
        Self { theta, delta }
    }

    pub fn quarter(theta: T) -> Self {
        Self::new(theta, T::FRAC_PI_2())
    }

    pub fn half(theta: T) -> Self {
        Self::new(theta, T::PI())
    }

    pub fn unitary(&self) -> JonesMatrix<T> {
        waveplate_unitary(*self)
    }
}

/// Jones matrix of a wave plate:
///
/// ```text
/// [ cos²θ + e^{iδ} sin²θ        ½(1 − e^{iδ}) sin2θ ]
/// [ ½(1 − e^{iδ}) sin2θ         sin²θ + e^{iδ} cos²θ ]
/// ```
pub fn waveplate_unitary<T: Real>(plate: WavePlate<T>) -> JonesMatrix<T> {
    let (s, c) = plate.theta.sin_cos();
    let phase = Complex::from_polar(T::one(), plate.delta);
    let re = |x: T| Complex::new(x, T::zero());
    let off = (re(T::one()) - phase) * re((two::<T>() * plate.theta).sin() / two::<T>());
    JonesMatrix {
        m: [[re(c * c) + phase * s * s, off], [off, re(s * s) + phase * c * c]],
    }
}

/// `U(q, dq) U(h, dh) |H>`: the state the two plates turn `|H>` into.
pub fn propagate<T: Real>(q: T, dq: T, h: T, dh: T) -> JonesVector<T> {
    let qwp = waveplate_unitary(WavePlate::new(q, dq));
    let hwp = waveplate_unitary(WavePlate::new(h, dh));
    qwp.apply(&hwp.apply(&JonesVector::horizontal()))
}

/// Pauli expectation values `(<σx>, <σy>, <σz>)` of a normalized Jones vector.
///
/// Fails when `| |aH|² + |aV|² − 1 | > 1e-9`.
pub fn bloch_from_jones<T: Real>(psi: &JonesVector<T>) -> Result<BlochVector<T>> {
    let n = psi.norm_sq();
    // f32 cannot resolve 1e-9; fall back to its own epsilon scale there.
    let tol = T::lit(1e-9).max(T::epsilon() * T::lit(64.0));
    if !((n - T::one()).abs() <= tol) {
        return Err(Error::NotNormalized { norm_sq: n.to_f64_lossy() });
    }
    let cross = psi.h.conj() * psi.v;
    Ok(Vec3::new(
        two::<T>() * cross.re,
        two::<T>() * cross.im,
        psi.h.norm_sqr() - psi.v.norm_sqr(),
    ))
}

/// Closed-form measurement vector for arbitrary plate angles and retardances,
/// `A1 cos(dq) + A2 sin(dq) + A3`.
pub fn measured_bloch_general<T: Real>(q: T, dq: T, h: T, dh: T) -> BlochVector<T> {
    let (t2, t4) = (two::<T>(), four::<T>());
    let quarter = T::one() / t4;
    let cd = dh.cos() - T::one();
    let sd = dh.sin();
    let (s4q, c4q) = (t4 * q).sin_cos();
    let (s4h, c4h) = (t4 * h).sin_cos();
    let (s4qh, c4qh) = (t4 * q - t4 * h).sin_cos();
    let (s2q, c2q) = (t2 * q).sin_cos();
    let s2h = (t2 * h).sin();

    let a1 = Vec3::new(
        quarter * (cd * (s4qh - s4q - s4h) - t2 * s4q),
        -sd * s2h,
        quarter * (cd * (c4qh - c4q - c4h + T::one()) - t2 * c4q + t2),
    );
    let a2 = Vec3::new(
        sd * c2q * s2h,
        -cd * (t2 * q - t2 * h).cos() * s2h - s2q,
        -sd * s2q * s2h,
    );
    let a3 = Vec3::new(
        quarter * (-cd * (s4qh - s4q + s4h) + t2 * s4q),
        T::zero(),
        quarter * (-cd * (c4qh - c4q + c4h - T::one()) + t2 * c4q + t2),
    );
    a1 * dq.cos() + a2 * dq.sin() + a3
}

/// Measurement vector of ideal plates, with `t = 2h − q`:
/// `(sin2q cos2t, sin2t, cos2q cos2t)`.
pub fn ideal_vector<T: Real>(q: T, h: T) -> BlochVector<T> {
    let t2 = two::<T>();
    let t = t2 * h - q;
    let (s2q, c2q) = (t2 * q).sin_cos();
    let (s2t, c2t) = (t2 * t).sin_cos();
    Vec3::new(s2q * c2t, s2t, c2q * c2t)
}
