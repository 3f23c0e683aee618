use std::sync::Arc;

use super::atomic::AtomicMeasure;
use super::transforms::{free_sum_unchecked, validate_alpha};
use super::MeasureError;
use crate::{rational_to_f64, Rational, C64};

/// An analytic map `z -> G(z)` on the upper half-plane together with the
/// metadata the inversion routines need.
pub trait CauchyEvaluator: Send + Sync {
    /// Evaluates `G(z)`. Callers guarantee `Im z > 0`.
    fn eval(&self, z: C64) -> C64;

    /// Human-readable description of the source.
    fn tag(&self) -> String;

    /// A radius `r` with the support of the measure inside `[-r, r]`.
    fn support_bound(&self) -> f64;

    /// Locations where atoms may sit.
    fn atom_candidates(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Cauchy transform of an [`AtomicMeasure`].
#[derive(Clone, Debug)]
pub struct AtomicCauchy {
    measure: AtomicMeasure,
    masses: Vec<(f64, f64)>,
}

impl AtomicCauchy {
    pub fn new(measure: AtomicMeasure) -> Self {
        let masses = measure
            .atoms()
            .iter()
            .map(|(t, m)| (*t, rational_to_f64(m)))
            .collect();
        Self { measure, masses }
    }

    pub fn measure(&self) -> &AtomicMeasure {
        &self.measure
    }
}

impl CauchyEvaluator for AtomicCauchy {
    fn eval(&self, z: C64) -> C64 {
        self.masses.iter().map(|&(t, m)| m / (z - t)).sum()
    }

    fn tag(&self) -> String {
        let atoms: Vec<String> = self
            .measure
            .atoms()
            .iter()
            .map(|(t, m)| format!("{m}@{t}"))
            .collect();
        format!("atomic[{}]", atoms.join(","))
    }

    fn support_bound(&self) -> f64 {
        self.measure.support_radius()
    }

    fn atom_candidates(&self) -> Vec<f64> {
        self.masses.iter().map(|&(t, _)| t).collect()
    }
}

/// Closed-form Cauchy transform of the free additive convolution of two
/// projection laws with the same trace `alpha`.
#[derive(Clone, Debug)]
pub struct FreeSumCauchy {
    alpha: Rational,
    alpha_f: f64,
}

impl FreeSumCauchy {
    /// Builds the evaluator and runs the Herglotz probe.
    pub fn new(alpha: &Rational) -> Result<Self, MeasureError> {
        let alpha_f = validate_alpha(alpha)?;
        let g = Self {
            alpha: alpha.clone(),
            alpha_f,
        };
        herglotz_check(&g)?;
        Ok(g)
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    /// Half-width `b` of the continuous support `[1 - b, 1 + b]`.
    pub fn half_width(&self) -> f64 {
        2.0 * (self.alpha_f * (1.0 - self.alpha_f)).sqrt()
    }
}

impl CauchyEvaluator for FreeSumCauchy {
    fn eval(&self, z: C64) -> C64 {
        free_sum_unchecked(self.alpha_f, z)
    }

    fn tag(&self) -> String {
        format!("free-sum(alpha={})", self.alpha)
    }

    fn support_bound(&self) -> f64 {
        2.0
    }

    fn atom_candidates(&self) -> Vec<f64> {
        vec![0.0, 1.0, 2.0]
    }
}

type CauchyFn = dyn Fn(C64) -> C64 + Send + Sync;

/// A Cauchy transform given by an arbitrary closure.
#[derive(Clone)]
pub struct FnCauchy {
    f: Arc<CauchyFn>,
    tag: String,
    bound: f64,
    candidates: Vec<f64>,
}

impl FnCauchy {
    pub fn new(
        tag: impl Into<String>,
        bound: f64,
        candidates: Vec<f64>,
        f: impl Fn(C64) -> C64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            f: Arc::new(f),
            tag: tag.into(),
            bound,
            candidates,
        }
    }
}

impl CauchyEvaluator for FnCauchy {
    fn eval(&self, z: C64) -> C64 {
        (self.f)(z)
    }

    fn tag(&self) -> String {
        self.tag.clone()
    }

    fn support_bound(&self) -> f64 {
        self.bound
    }

    fn atom_candidates(&self) -> Vec<f64> {
        self.candidates.clone()
    }
}

/// Checks `Im G(z) < 0` on a fixed grid of the upper half-plane.
pub fn herglotz_check(g: &dyn CauchyEvaluator) -> Result<(), MeasureError> {
    let r = g.support_bound().max(1.0);
    for i in 0..=24 {
        let x = -2.0 * r + 4.0 * r * i as f64 / 24.0 + 0.013;
        for y in [1e-6, 1e-3, 0.1, 1.0, 10.0] {
            let z = C64::new(x, y);
            let v = g.eval(z);
            if !(v.im < 0.0) {
                return Err(MeasureError::BranchFailure(format!(
                    "{}: Im G({z}) = {} is not negative",
                    g.tag(),
                    v.im
                )));
            }
        }
    }
    Ok(())
}

/// Checks `|z G(z) - 1| <= 10 (1 + |m1|) / |z|` at several points with `|z| >= 1e3`.
pub fn normalization_check(g: &dyn CauchyEvaluator, m1: f64) -> Result<(), MeasureError> {
    let probes = [
        C64::new(0.0, 1e3),
        C64::new(0.0, 1e6),
        C64::new(1e3, 1e3),
        C64::new(-2e3, 5e2),
    ];
    for z in probes {
        let dev = (z * g.eval(z) - 1.0).norm();
        let bound = 10.0 * (1.0 + m1.abs()) / z.norm();
        if dev > bound {
            return Err(MeasureError::InvalidMeasure(format!(
                "{}: |zG(z) - 1| = {dev} exceeds {bound} at z = {z}",
                g.tag()
            )));
        }
    }
    Ok(())
}
