use std::f64::consts::PI;

use super::evaluator::CauchyEvaluator;
use super::MeasureError;
use crate::numeric::compensated_sum;
use crate::C64;

/// Default schedule for atom extrapolation.
pub const DEFAULT_EPS_SCHEDULE: [f64; 3] = [1e-2, 1e-3, 1e-4];

const DEFAULT_ATOM_TOLERANCE: f64 = 0.1;

/// Mass of the atom of `G`'s measure at `a`, extrapolated from
/// `eps |G(a + i eps)|` over `schedule`.
///
/// The extrapolation fits a polynomial in `sqrt(eps)`: at a square-root
/// spectral edge the probe decays like `sqrt(eps)`, inside a smooth density
/// like `eps`, and both terms are removed exactly.
pub fn atom_mass(g: &dyn CauchyEvaluator, a: f64, schedule: &[f64]) -> Result<f64, MeasureError> {
    atom_mass_with_tolerance(g, a, schedule, DEFAULT_ATOM_TOLERANCE)
}

/// [`atom_mass`] with an explicit stabilization tolerance on successive probes.
pub fn atom_mass_with_tolerance(
    g: &dyn CauchyEvaluator,
    a: f64,
    schedule: &[f64],
    tolerance: f64,
) -> Result<f64, MeasureError> {
    if schedule.is_empty() {
        return Err(MeasureError::InvalidArgument("empty epsilon schedule".into()));
    }
    if schedule.iter().any(|e| !(*e > 0.0)) || schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(MeasureError::InvalidArgument(
            "epsilon schedule must be positive and strictly decreasing".into(),
        ));
    }
    let values: Vec<f64> = schedule
        .iter()
        .map(|&e| e * g.eval(C64::new(a, e)).norm())
        .collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(MeasureError::NonConvergence { location: a, values });
    }
    let diffs: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let settled = match diffs.as_slice() {
        [] => true,
        [.., prev, last] => *last <= tolerance && *last <= 1.5 * prev + 1e-12,
        [last] => *last <= tolerance,
    };
    if !settled {
        return Err(MeasureError::NonConvergence { location: a, values });
    }
    let nodes: Vec<f64> = schedule.iter().map(|e| e.sqrt()).collect();
    Ok(neville_at_zero(&nodes, &values).clamp(0.0, 1.0))
}

/// Value at 0 of the interpolating polynomial through `(x_k, y_k)`.
fn neville_at_zero(x: &[f64], y: &[f64]) -> f64 {
    let mut p = y.to_vec();
    let n = x.len();
    for level in 1..n {
        for i in 0..n - level {
            let j = i + level;
            p[i] = (x[j] * p[i] - x[i] * p[i + 1]) / (x[j] - x[i]);
        }
    }
    p[0]
}

/// Atoms at the candidate locations whose extrapolated mass exceeds `threshold`.
pub fn detect_atoms(
    g: &dyn CauchyEvaluator,
    candidates: &[f64],
    schedule: &[f64],
    threshold: f64,
) -> Result<Vec<(f64, f64)>, MeasureError> {
    let mut atoms = Vec::new();
    for &c in candidates {
        let m = atom_mass(g, c, schedule)?;
        if m > threshold {
            atoms.push((c, m));
        }
    }
    Ok(atoms)
}

/// `-(1/pi) Im (G - atomic part)(x + i eps)`, clamped at 0.
pub fn density_at(g: &dyn CauchyEvaluator, x: f64, eps: f64, atoms: &[(f64, f64)]) -> f64 {
    let z = C64::new(x, eps);
    let atomic: C64 = atoms.iter().map(|&(c, m)| m / (z - c)).sum();
    (-(g.eval(z) - atomic).im / PI).max(0.0)
}

/// Density and atoms recovered from a Cauchy transform.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSample {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub atoms: Vec<(f64, f64)>,
}

impl SpectralSample {
    /// Trapezoid integral of the density over the grid.
    pub fn continuous_mass(&self) -> f64 {
        compensated_sum(
            self.grid
                .windows(2)
                .zip(self.density.windows(2))
                .map(|(x, d)| 0.5 * (x[1] - x[0]) * (d[0] + d[1])),
        )
    }

    pub fn atomic_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.continuous_mass() + self.atomic_mass()
    }
}

/// Knobs for [`stieltjes_density`].
#[derive(Clone, Debug)]
pub struct StieltjesOptions {
    /// Atom locations to probe; `None` uses the evaluator's candidates.
    pub candidates: Option<Vec<f64>>,
    pub schedule: Vec<f64>,
    /// Extrapolated masses at or below this are treated as absent.
    pub atom_threshold: f64,
    /// Allowed shortfall of the recovered total mass below 1.
    pub mass_tolerance: f64,
}

impl Default for StieltjesOptions {
    fn default() -> Self {
        Self {
            candidates: None,
            schedule: DEFAULT_EPS_SCHEDULE.to_vec(),
            atom_threshold: 1e-4,
            mass_tolerance: 5e-2,
        }
    }
}

/// Recovers density on `grid` and atoms at candidate locations.
pub fn stieltjes_density(
    g: &dyn CauchyEvaluator,
    grid: &[f64],
    eps: f64,
    opts: &StieltjesOptions,
) -> Result<SpectralSample, MeasureError> {
    if !(eps > 0.0) {
        return Err(MeasureError::InvalidArgument(format!("eps = {eps} must be positive")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(MeasureError::InvalidArgument("grid must be strictly ascending".into()));
    }
    let candidates = opts.candidates.clone().unwrap_or_else(|| g.atom_candidates());
    let atoms = detect_atoms(g, &candidates, &opts.schedule, opts.atom_threshold)?;
    if let Some(&(c, _)) = atoms.iter().find(|(c, _)| grid.contains(c)) {
        return Err(MeasureError::InvalidArgument(format!("grid contains the atom at {c}")));
    }
    let density = grid.iter().map(|&x| density_at(g, x, eps, &atoms)).collect();
    let sample = SpectralSample {
        grid: grid.to_vec(),
        density,
        atoms,
    };
    let mass = sample.total_mass();
    if mass < 1.0 - opts.mass_tolerance {
        return Err(MeasureError::MassDeficit {
            mass,
            tolerance: opts.mass_tolerance,
        });
    }
    Ok(sample)
}

const CONTOUR_POINTS: usize = 512;
const MOMENT_RESIDUAL_TOLERANCE: f64 = 1e-8;

/// Moments `m_1..m_{k_max}` of `G`'s measure, read off the expansion
/// `G(z) = sum m_k z^{-k-1}` by a trapezoid rule on a circle enclosing the
/// support. Real measures give `G(conj z) = conj G(z)`, so only upper
/// half-plane evaluations are needed.
pub fn moments_from_cauchy(g: &dyn CauchyEvaluator, k_max: usize) -> Result<Vec<f64>, MeasureError> {
    if k_max == 0 {
        return Err(MeasureError::InvalidArgument("k_max must be at least 1".into()));
    }
    let radius = 1.5 * g.support_bound() + 0.5;
    let fine = contour_moments(g, k_max, radius, 2 * CONTOUR_POINTS);
    let coarse = contour_moments(g, k_max, radius, CONTOUR_POINTS);
    let mut residual = (fine[0] - 1.0).abs();
    for k in 1..=k_max {
        let scale = radius.powi(k as i32).max(1.0);
        residual = residual.max((fine[k] - coarse[k]).abs() / scale);
    }
    if !(residual <= MOMENT_RESIDUAL_TOLERANCE) {
        return Err(MeasureError::IllConditioned { residual });
    }
    Ok(fine[1..].to_vec())
}

fn contour_moments(g: &dyn CauchyEvaluator, k_max: usize, radius: f64, half_points: usize) -> Vec<f64> {
    let values: Vec<(C64, C64)> = (0..half_points)
        .map(|j| {
            let theta = PI * (j as f64 + 0.5) / half_points as f64;
            let z = C64::from_polar(radius, theta);
            (z, g.eval(z))
        })
        .collect();
    (0..=k_max)
        .map(|k| {
            let s = compensated_sum(values.iter().map(|(z, gz)| (z.powi(k as i32 + 1) * gz).re));
            s / half_points as f64
        })
        .collect()
}
