//! Probability measures on the real line and their Cauchy transforms.
//!
//! Conventions: `G_mu(z) = sum mass / (z - t)` (so `Im G < 0` on the upper
//! half-plane) and `R(w) = G^{-1}(w) - 1/w`.

mod atomic;
mod evaluator;
mod inversion;
mod transforms;

pub use atomic::{AtomicMeasure, MeasureJson};
pub use evaluator::{
    herglotz_check, normalization_check, AtomicCauchy, CauchyEvaluator, FnCauchy, FreeSumCauchy,
};
pub use inversion::{
    atom_mass, atom_mass_with_tolerance, density_at, detect_atoms, moments_from_cauchy,
    stieltjes_density, SpectralSample, StieltjesOptions, DEFAULT_EPS_SCHEDULE,
};
pub use transforms::{
    cauchy_transform, free_sum_cauchy, free_sum_via_r_transform, projection_r_transform,
    projection_r_transform_derivative,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("point {re} + {im}i is not in the open upper half-plane")]
    OffHalfPlane { re: f64, im: f64 },
    #[error("parameter alpha = {0} is outside (0, 1)")]
    InvalidAlpha(f64),
    #[error("square-root branch failure: {0}")]
    BranchFailure(String),
    #[error("atom extrapolation did not converge at {location}: values {values:?}")]
    NonConvergence { location: f64, values: Vec<f64> },
    #[error("recovered mass {mass} is below 1 - {tolerance}")]
    MassDeficit { mass: f64, tolerance: f64 },
    #[error("moment extraction ill-conditioned: residual {residual}")]
    IllConditioned { residual: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub(crate) fn check_upper(z: crate::C64) -> Result<(), MeasureError> {
    if z.im > 0.0 && z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(MeasureError::OffHalfPlane { re: z.re, im: z.im })
    }
}
