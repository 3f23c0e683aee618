use num_traits::{One, Signed};

use super::atomic::AtomicMeasure;
use super::{check_upper, MeasureError};
use crate::{rational_to_f64, Rational, C64};

/// `G_mu(z) = sum mass / (z - location)` for `Im z > 0`.
pub fn cauchy_transform(mu: &AtomicMeasure, z: C64) -> Result<C64, MeasureError> {
    check_upper(z)?;
    Ok(mu
        .atoms()
        .iter()
        .map(|(t, m)| rational_to_f64(m) / (z - t))
        .sum())
}

pub(crate) fn validate_alpha(alpha: &Rational) -> Result<f64, MeasureError> {
    if !alpha.is_positive() || *alpha >= Rational::one() {
        return Err(MeasureError::InvalidAlpha(rational_to_f64(alpha)));
    }
    Ok(rational_to_f64(alpha))
}

fn discriminant(alpha: f64, w: C64) -> C64 {
    let one_minus = C64::new(1.0, 0.0) - w;
    one_minus * one_minus + 4.0 * alpha * w
}

const MAX_RAY_STEPS: usize = 1 << 14;

/// Square root `s(w)` of `(1 - w)^2 + 4 alpha w` continued from `s(0) = 1`
/// along the segment `[0, w]`.
fn continued_root(alpha: f64, w: C64) -> Result<C64, MeasureError> {
    let mut steps = 64;
    'refine: while steps <= MAX_RAY_STEPS {
        let mut prev = C64::new(1.0, 0.0);
        for k in 1..=steps {
            let wk = w * (k as f64 / steps as f64);
            let r = discriminant(alpha, wk).sqrt();
            let (near, far) = if (r - prev).norm() <= (-r - prev).norm() {
                (r, -r)
            } else {
                (-r, r)
            };
            // Require a clear winner; otherwise refine the path.
            if (near - prev).norm() * 4.0 > (far - prev).norm() {
                steps *= 4;
                continue 'refine;
            }
            prev = near;
        }
        return Ok(prev);
    }
    Err(MeasureError::BranchFailure(format!(
        "square-root branches collide on the ray to w = {w}"
    )))
}

fn r_from_root(w: C64, s: C64) -> C64 {
    (w - 1.0 + s) / (2.0 * w)
}

/// R-transform of the law of a projection of trace `alpha`:
/// `R(w) = (w - 1 + s(w)) / (2w)` with `s(w)^2 = (1 - w)^2 + 4 alpha w`, the
/// branch chosen by continuation so that `R(w) -> alpha` as `w -> 0`.
///
/// Valid on the disk `|w| < 1`; the branch points lie on the unit circle.
pub fn projection_r_transform(alpha: &Rational, w: C64) -> Result<C64, MeasureError> {
    let a = validate_alpha(alpha)?;
    r_transform_f64(a, w).map(|(r, _)| r)
}

/// Derivative `R'(w)` on the same branch as [`projection_r_transform`].
pub fn projection_r_transform_derivative(alpha: &Rational, w: C64) -> Result<C64, MeasureError> {
    let a = validate_alpha(alpha)?;
    let (_, s) = r_transform_f64(a, w)?;
    Ok(r_derivative(a, w, s))
}

fn r_derivative(alpha: f64, w: C64, s: C64) -> C64 {
    let ds = (w - 1.0 + 2.0 * alpha) / s;
    ((1.0 + ds) * w - (w - 1.0 + s)) / (2.0 * w * w)
}

fn r_transform_f64(alpha: f64, w: C64) -> Result<(C64, C64), MeasureError> {
    if !(w.re.is_finite() && w.im.is_finite()) || w.norm() == 0.0 {
        return Err(MeasureError::InvalidArgument(format!("w = {w} must be finite and nonzero")));
    }
    if w.norm() >= 1.0 - 1e-9 {
        return Err(MeasureError::BranchFailure(format!(
            "|w| = {} reaches the branch circle |w| = 1",
            w.norm()
        )));
    }
    let s = continued_root(alpha, w)?;
    // The continued branch must start at the first cumulant.
    let probe = w * (1e-4 / w.norm()).min(1.0);
    let sp = continued_root(alpha, probe)?;
    let rp = r_from_root(probe, sp);
    if (rp - alpha).norm() > 1e-3 {
        return Err(MeasureError::BranchFailure(format!(
            "R(w) does not tend to alpha along the ray to {w}"
        )));
    }
    Ok((r_from_root(w, s), s))
}

/// Product of principal roots `sqrt(z - 1 - b) sqrt(z - 1 + b)`: analytic off
/// `[1 - b, 1 + b]` and asymptotic to `z - 1`.
fn edge_root(z: C64, b: f64) -> C64 {
    (z - 1.0 - b).sqrt() * (z - 1.0 + b).sqrt()
}

pub(crate) fn free_sum_unchecked(alpha: f64, z: C64) -> C64 {
    let b = 2.0 * (alpha * (1.0 - alpha)).sqrt();
    (edge_root(z, b) - (1.0 - 2.0 * alpha)) / (z * (z - 2.0))
}

/// Cauchy transform of `Bernoulli(alpha) boxplus Bernoulli(alpha)`:
/// `G(z) = (-(1 - 2 alpha) + sqrt((z - 1)^2 - 4 alpha (1 - alpha))) / (z (z - 2))`
/// with the root asymptotic to `z - 1`.
pub fn free_sum_cauchy(alpha: &Rational, z: C64) -> Result<C64, MeasureError> {
    let a = validate_alpha(alpha)?;
    check_upper(z)?;
    Ok(free_sum_unchecked(a, z))
}

/// The same transform computed by inverting `K(w) = 2 R(w) + 1/w` numerically,
/// following the root from far up the imaginary direction down to `z`.
///
/// Requires `Im z > 1` so that the inverse stays inside `|w| < 1`.
pub fn free_sum_via_r_transform(alpha: &Rational, z: C64) -> Result<C64, MeasureError> {
    let a = validate_alpha(alpha)?;
    check_upper(z)?;
    if z.im <= 1.0 {
        return Err(MeasureError::InvalidArgument(format!(
            "inversion route needs Im z > 1, got {z}"
        )));
    }
    let top = 20.0 * (1.0 + z.norm());
    let segments = 40;
    let start = C64::new(z.re, top);
    let mut w = 1.0 / (start - 2.0 * a);
    for k in 0..=segments {
        let t = k as f64 / segments as f64;
        let zk = C64::new(z.re, top + (z.im - top) * t);
        w = newton_k_inverse(a, zk, w)?;
    }
    Ok(w)
}

fn newton_k_inverse(alpha: f64, z: C64, mut w: C64) -> Result<C64, MeasureError> {
    for _ in 0..100 {
        let (r, s) = r_transform_f64(alpha, w)?;
        let f = 2.0 * r + 1.0 / w - z;
        let df = 2.0 * r_derivative(alpha, w, s) - 1.0 / (w * w);
        let mut step = f / df;
        // Damp the step until the iterate stays inside the branch disk.
        while (w - step).norm() >= 0.99 {
            step *= 0.5;
        }
        w -= step;
        if step.norm() <= 1e-15 * w.norm().max(1e-300) {
            return Ok(w);
        }
    }
    let (r, _) = r_transform_f64(alpha, w)?;
    let res = (2.0 * r + 1.0 / w - z).norm();
    if res <= 1e-10 * z.norm() {
        Ok(w)
    } else {
        Err(MeasureError::BranchFailure(format!(
            "Newton inversion of K did not converge at z = {z} (residual {res})"
        )))
    }
}
