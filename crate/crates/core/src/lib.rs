// SPDX-License-Identifier: Apache-2.0

//! Projective measurements on polarization qubits through a quarter-wave
//! plate, a half-wave plate and a polarizing beam splitter, with imperfect
//! plates.
//!
//! The crate covers the exact Jones model of the device ([`jones`]), the
//! effect of axis and retardance deviations on the realized measurement
//! vector ([`error_model`]), four-setting error-compensation measurements
//! ([`ecm`]), the systematic error those deviations cause in linear-inversion
//! state tomography ([`tomography`]) and a seeded Monte Carlo of the photon
//! counting experiment ([`photon_sim`]).
//!
//! The math is generic over [`Real`] (`f32` or `f64`); the aliases below fix
//! it to `f64`, which is what the stated tolerances assume.

// Negated float comparisons are deliberate: they reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ecm;
pub mod error;
pub mod error_model;
pub mod jones;
pub mod linalg;
pub mod photon_sim;
pub mod recipes;
pub mod report;
pub mod scalar;
pub mod tomography;

pub use ecm::{
    compensating_pair, ecm4, effective_vector, mub_q_sensitivity_totals, residual_q_norm_sq,
    summed_sensitivity, u0, AngleSetting, CompositeMeasurement, CompositeRecord,
};
pub use error::{Error, Result};
pub use error_model::{
    analytic_partial, fd_partial, realized_vector, scaling_exponent, DeviceError, ErrorChannel,
};
pub use jones::{
    bloch_from_jones, ideal_vector, measured_bloch_general, propagate, waveplate_unitary, BlochVector,
    JonesMatrix, JonesVector, WavePlate,
};
pub use linalg::{Mat3, Vec3};
pub use scalar::Real;
pub use tomography::{
    ecm_quadratic_coefficient, estimate, ncm_quadratic_coefficients, pauli_scheme, predicted_error_budget,
    systematic_error_exact, Mode, ProjectionRecord, QubitState, TomographyScheme,
};

pub type Bloch = BlochVector<f64>;
pub type Setting = AngleSetting<f64>;
pub type Composite = CompositeMeasurement<f64>;
pub type Device = DeviceError<f64>;
pub type State = QubitState<f64>;
pub type Scheme = TomographyScheme<f64>;
