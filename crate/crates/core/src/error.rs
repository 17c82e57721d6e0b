// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::error_model::ErrorChannel;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("Jones vector is not normalized: |aH|^2 + |aV|^2 = {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("finite-difference step {step} outside [1e-8, 1e-2]")]
    StepOutOfRange { step: f64 },

    #[error("scaling fit needs at least 8 samples, got {0}")]
    TooFewSamples(usize),

    #[error("scaling fit range [{min}, {max}] must be positive and span at least one decade")]
    BadFitRange { min: f64, max: f64 },

    #[error("degenerate scaling fit: error norms underflow or are non-positive")]
    DegenerateFit,

    #[error("channel {0} has no first-order compensating partner")]
    NotCompensable(ErrorChannel),

    #[error("composite measurement must contain at least one setting")]
    EmptyComposite,

    #[error("composite settings do not share an ideal measurement vector (mismatch {0:e})")]
    InconsistentComposite(f64),

    #[error("tomography scheme is singular: |det R0| = {0:e}")]
    SingularScheme(f64),

    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),

    #[error("outcome probability {p} outside [0, 1]")]
    ProbabilityOutOfRange { p: f64 },

    #[error("count record does not match scheme: {0}")]
    CountMismatch(String),

    #[error("sweep grid must be non-empty and sorted")]
    BadGrid,
}

pub type Result<T> = std::result::Result<T, Error>;
