// SPDX-License-Identifier: Apache-2.0

//! Scalar abstraction shared by the measurement model.

use std::fmt::Debug;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point scalar the Jones and Bloch calculus is written against.
///
/// Implemented for `f32` and `f64`. Tolerances quoted throughout the crate
/// (1e-12 and friends) assume `f64`.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Default + Send + Sync + 'static {
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[inline]
pub(crate) fn two<T: Real>() -> T {
    T::one() + T::one()
}

#[inline]
pub(crate) fn four<T: Real>() -> T {
    two::<T>() * two::<T>()
}
