use std::f64::consts::PI;

use freeprob_core::measures::*;
use freeprob_core::numeric::binomial;
use freeprob_core::{ratio, C64};
use proptest::prelude::*;

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

/// Independent oracle: Newton inversion of the two-atom Cauchy transform.
fn invert_bernoulli_cauchy(alpha: f64, w: C64) -> C64 {
    let g = |z: C64| (1.0 - alpha) / z + alpha / (z - 1.0);
    let dg = |z: C64| -(1.0 - alpha) / (z * z) - alpha / ((z - 1.0) * (z - 1.0));
    let mut z = 1.0 / w + alpha;
    for _ in 0..200 {
        let step = (g(z) - w) / dg(z);
        z -= step;
        if step.norm() < 1e-16 * z.norm() {
            break;
        }
    }
    z
}

/// Independent oracle: arcsine Cauchy transform by periodic trapezoid after x = 1 - cos(theta).
fn arcsine_cauchy_by_quadrature(z: C64) -> C64 {
    let n = 4000;
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..n {
        let theta = PI * (j as f64 + 0.5) / n as f64;
        acc += 1.0 / (z - 1.0 + theta.cos());
    }
    acc / n as f64
}

fn arcsine_moment(k: u64) -> f64 {
    binomial(2 * k, k) / 2f64.powi(k as i32)
}

#[test]
fn cauchy_transform_examples() {
    let i = C64::new(0.0, 1.0);
    let g = cauchy_transform(&AtomicMeasure::dirac(0.0), i).unwrap();
    assert!(close(g, -i, 1e-15));

    let half = AtomicMeasure::bernoulli(&ratio(1, 2)).unwrap();
    let g = cauchy_transform(&half, C64::new(2.0, 1e-12)).unwrap();
    assert!((g.re - 0.75).abs() < 1e-9);

    let quarter = AtomicMeasure::bernoulli(&ratio(1, 4)).unwrap();
    let g = cauchy_transform(&quarter, i).unwrap();
    // 0.25 / (i - 1) = -0.125 - 0.125 i ; 0.75 / i = -0.75 i
    assert!(close(g, C64::new(-0.125, -0.875), 1e-15));
}

#[test]
fn cauchy_transform_rejects_lower_half_plane() {
    let mu = AtomicMeasure::dirac(1.0);
    assert!(matches!(
        cauchy_transform(&mu, C64::new(0.0, 0.0)),
        Err(MeasureError::OffHalfPlane { .. })
    ));
    assert!(cauchy_transform(&mu, C64::new(0.3, -1.0)).is_err());
}

#[test]
fn atomic_measure_validation() {
    assert!(AtomicMeasure::new(vec![(0.0, ratio(1, 2))]).is_err());
    assert!(AtomicMeasure::new(vec![(0.0, ratio(1, 2)), (0.0, ratio(1, 2))]).is_err());
    let mu = AtomicMeasure::new(vec![(3.0, ratio(1, 3)), (-1.0, ratio(2, 3))]).unwrap();
    assert_eq!(mu.atoms()[0].0, -1.0);
    let json = serde_json::to_string(&mu.to_json().unwrap()).unwrap();
    assert_eq!(json, r#"{"atoms":[[-1.0,2,3],[3.0,1,3]]}"#);
    let back: MeasureJson = serde_json::from_str(&json).unwrap();
    assert_eq!(AtomicMeasure::from_json(&back).unwrap(), mu);
}

#[test]
fn r_transform_tends_to_alpha_at_zero() {
    for (n, d) in [(1, 2), (1, 3), (1, 4), (3, 4)] {
        let a = ratio(n, d);
        let r = projection_r_transform(&a, C64::new(1e-7, 1e-8)).unwrap();
        assert!(close(r, C64::new(n as f64 / d as f64, 0.0), 1e-6));
    }
}

#[test]
fn r_transform_matches_numeric_inversion() {
    for (n, d) in [(1, 2), (1, 4), (1, 3)] {
        let alpha = n as f64 / d as f64;
        for w in [
            C64::new(0.1, 0.0),
            C64::new(-0.05, 0.0),
            C64::new(0.2, 0.3),
            C64::new(-0.4, -0.5),
        ] {
            let r = projection_r_transform(&ratio(n, d), w).unwrap();
            let oracle = invert_bernoulli_cauchy(alpha, w) - 1.0 / w;
            assert!(close(r, oracle, 1e-8), "alpha {alpha} w {w}: {r} vs {oracle}");
        }
    }
}

#[test]
fn r_transform_derivative_matches_difference_quotient() {
    let a = ratio(1, 3);
    let w = C64::new(0.2, -0.1);
    let h = 1e-6;
    let fd = (projection_r_transform(&a, w + h).unwrap() - projection_r_transform(&a, w - h).unwrap())
        / (2.0 * h);
    let d = projection_r_transform_derivative(&a, w).unwrap();
    assert!(close(d, fd, 1e-7));
}

#[test]
fn r_transform_reports_branch_failure_outside_disk() {
    let a = ratio(1, 4);
    assert!(matches!(
        projection_r_transform(&a, C64::new(1.2, 0.0)),
        Err(MeasureError::BranchFailure(_))
    ));
    assert!(projection_r_transform(&a, C64::new(0.0, 0.0)).is_err());
}

#[test]
fn arcsine_case_matches_quadrature_and_moment_series() {
    let g = FreeSumCauchy::new(&ratio(1, 2)).unwrap();
    let z = C64::new(1.0, 1.0);
    assert!(close(g.eval(z), arcsine_cauchy_by_quadrature(z), 1e-6));
    for z in [C64::new(0.0, 5.0), C64::new(4.0, 3.0)] {
        let series: C64 = (0..200u64)
            .map(|k| arcsine_moment(k.min(60)) * if k > 60 { 0.0 } else { 1.0 } / z.powi(k as i32 + 1))
            .sum();
        assert!(close(g.eval(z), series, 1e-6), "{z}");
    }
}

#[test]
fn closed_form_agrees_with_inversion_route() {
    for (n, d) in [(1, 2), (1, 3), (1, 4), (2, 3)] {
        let a = ratio(n, d);
        for x in [-1.0, 0.0, 0.5, 1.0, 1.7, 3.0] {
            for y in [1.1, 2.0, 5.0] {
                let z = C64::new(x, y);
                let closed = free_sum_cauchy(&a, z).unwrap();
                let inverted = free_sum_via_r_transform(&a, z).unwrap();
                assert!(close(closed, inverted, 1e-8), "alpha {n}/{d} z {z}: {closed} vs {inverted}");
            }
        }
    }
}

#[test]
fn free_sum_normalization() {
    for (n, d) in [(1, 2), (1, 3), (1, 4)] {
        let g = FreeSumCauchy::new(&ratio(n, d)).unwrap();
        let z = C64::new(0.0, 1e6);
        assert!((z * g.eval(z) - 1.0).norm() < 1e-5);
        normalization_check(&g, 2.0 * n as f64 / d as f64).unwrap();
    }
}

#[test]
fn atom_masses_of_free_sum() {
    let s = DEFAULT_EPS_SCHEDULE;
    for (n, d) in [(1, 2), (1, 3), (1, 4)] {
        let alpha = n as f64 / d as f64;
        let g = FreeSumCauchy::new(&ratio(n, d)).unwrap();
        assert!(atom_mass(&g, 1.0, &s).unwrap() <= 1e-3);
        let at0 = atom_mass(&g, 0.0, &s).unwrap();
        assert!((at0 - (1.0 - 2.0 * alpha).max(0.0)).abs() <= 1e-3, "alpha {alpha}: {at0}");
        assert!(atom_mass(&g, 2.0, &s).unwrap() <= 1e-3);
        for a in [0.5, 1.5] {
            assert!(atom_mass(&g, a, &s).unwrap() <= 1e-3);
        }
    }
    let g = FreeSumCauchy::new(&ratio(3, 4)).unwrap();
    assert!((atom_mass(&g, 2.0, &s).unwrap() - 0.5).abs() <= 1e-3);
}

#[test]
fn atom_mass_of_dirac() {
    let g = AtomicCauchy::new(AtomicMeasure::dirac(1.0));
    assert!((atom_mass(&g, 1.0, &DEFAULT_EPS_SCHEDULE).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn atom_mass_rejects_bad_schedules_and_divergence() {
    let g = AtomicCauchy::new(AtomicMeasure::dirac(1.0));
    assert!(atom_mass(&g, 1.0, &[]).is_err());
    assert!(atom_mass(&g, 1.0, &[1e-3, 1e-2]).is_err());
    // A transform whose probe grows as eps shrinks never settles.
    let wild = FnCauchy::new("wild", 1.0, vec![], |z: C64| 1.0 / (z * z));
    assert!(matches!(
        atom_mass(&wild, 0.0, &DEFAULT_EPS_SCHEDULE),
        Err(MeasureError::NonConvergence { .. })
    ));
}

#[test]
fn stieltjes_recovers_arcsine_density() {
    let g = FreeSumCauchy::new(&ratio(1, 2)).unwrap();
    let grid: Vec<f64> = (1..2000).map(|k| k as f64 * 1e-3).collect();
    let sample = stieltjes_density(&g, &grid, 1e-10, &StieltjesOptions::default()).unwrap();
    assert!(sample.atoms.is_empty());
    for (x, d) in sample.grid.iter().zip(&sample.density) {
        if (0.1..=1.9).contains(x) {
            let exact = 1.0 / (PI * (x * (2.0 - x)).sqrt());
            assert!((d - exact).abs() < 1e-3, "x = {x}");
        }
    }
}

#[test]
fn stieltjes_of_dirac_is_all_atom() {
    let g = AtomicCauchy::new(AtomicMeasure::dirac(0.0));
    let grid: Vec<f64> = (1..200).map(|k| k as f64 * 0.01).collect();
    let sample = stieltjes_density(&g, &grid, 1e-9, &StieltjesOptions::default()).unwrap();
    assert_eq!(sample.atoms.len(), 1);
    assert_eq!(sample.atoms[0].0, 0.0);
    assert!((sample.atoms[0].1 - 1.0).abs() < 1e-12);
    assert!(sample.density.iter().all(|d| *d < 1e-6));
}

#[test]
fn stieltjes_mass_bookkeeping_for_quarter() {
    let g = FreeSumCauchy::new(&ratio(1, 4)).unwrap();
    let grid: Vec<f64> = (1..4000).map(|k| k as f64 * 5e-4).collect();
    let sample = stieltjes_density(&g, &grid, 1e-10, &StieltjesOptions::default()).unwrap();
    assert_eq!(sample.atoms.len(), 1);
    assert!((sample.atoms[0].1 - 0.5).abs() < 1e-3);
    assert!((sample.continuous_mass() - 0.5).abs() < 1e-3);
}

#[test]
fn stieltjes_reports_mass_deficit() {
    let g = FreeSumCauchy::new(&ratio(1, 2)).unwrap();
    let grid: Vec<f64> = (0..50).map(|k| 0.5 + k as f64 * 0.01).collect();
    assert!(matches!(
        stieltjes_density(&g, &grid, 1e-10, &StieltjesOptions::default()),
        Err(MeasureError::MassDeficit { .. })
    ));
}

#[test]
fn moments_of_simple_measures() {
    let m = moments_from_cauchy(&AtomicCauchy::new(AtomicMeasure::dirac(1.0)), 8).unwrap();
    assert!(m.iter().all(|v| (v - 1.0).abs() < 1e-10));
    for (n, d) in [(1, 3), (1, 4)] {
        let mu = AtomicMeasure::bernoulli(&ratio(n, d)).unwrap();
        let m = moments_from_cauchy(&AtomicCauchy::new(mu), 6).unwrap();
        assert!(m.iter().all(|v| (v - n as f64 / d as f64).abs() < 1e-10));
    }
}

#[test]
fn moments_of_arcsine() {
    let g = FreeSumCauchy::new(&ratio(1, 2)).unwrap();
    let m = moments_from_cauchy(&g, 8).unwrap();
    for k in 1..=8u64 {
        assert!((m[k as usize - 1] - arcsine_moment(k)).abs() < 1e-6, "k = {k}");
    }
}

#[test]
fn moments_flag_ill_conditioned_transforms() {
    // Not a Cauchy transform of a probability measure: z G(z) -> 2.
    let bad = FnCauchy::new("double", 1.0, vec![], |z: C64| 2.0 / z);
    assert!(matches!(moments_from_cauchy(&bad, 3), Err(MeasureError::IllConditioned { .. })));
}

proptest! {
    #[test]
    fn free_sum_is_herglotz(n in 1i64..40, x in -3.0f64..5.0, logy in -8.0f64..3.0) {
        let a = ratio(n, 41);
        let z = C64::new(x, 10f64.powf(logy));
        let g = free_sum_cauchy(&a, z).unwrap();
        prop_assert!(g.im < 0.0);
    }

    #[test]
    fn free_sum_normalization_bound(n in 1i64..40, theta in 0.01f64..3.13, logr in 3.0f64..6.0) {
        let a = ratio(n, 41);
        let z = C64::from_polar(10f64.powf(logr), theta);
        let g = free_sum_cauchy(&a, z).unwrap();
        let m1 = 2.0 * n as f64 / 41.0;
        prop_assert!((z * g - 1.0).norm() <= 10.0 * (1.0 + m1) / z.norm());
    }

    #[test]
    fn atomic_cauchy_is_herglotz(t in -5.0f64..5.0, x in -6.0f64..6.0, y in 1e-6f64..10.0) {
        let mu = AtomicMeasure::new(vec![(t, ratio(1, 3)), (t + 1.0, ratio(2, 3))]).unwrap();
        prop_assert!(cauchy_transform(&mu, C64::new(x, y)).unwrap().im < 0.0);
    }
}
