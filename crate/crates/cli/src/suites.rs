//! The verification suites behind each subcommand.

use anyhow::{bail, Result};
use freeprob_core::freeprod::{
    parse_word_literal, projection_sum_moments, trace_word, AlgebraSet, ExactScalar, FiniteAbelianAlgebra, FreeWord,
    GaussianRational,
};
use freeprob_core::measures::{
    atom_mass, free_sum_cauchy, free_sum_via_r_transform, moments_from_cauchy, FreeSumCauchy, DEFAULT_EPS_SCHEDULE,
};
use freeprob_core::rmt::linalg::{identity, scale, sub};
use freeprob_core::rmt::suites::WEAK_FC_CONTROL_OFFSET;
use freeprob_core::rmt::{
    build_reassembly, generation_check, integral_rank, kernel_dimension, radial_check, radial_control,
    reassembly_check, sample_projection_pair, semicircular_perp_check, stream, weak_fc_check, weak_fc_control,
    ReassemblySpec, WeakFcKind,
};
use freeprob_core::twoproj::{build_two_projection_model, sign_unitary_moment};
use freeprob_core::{rational_to_f64, Rational, C64};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::report::{Check, SuiteResult};

/// Subcommands in the order `all` runs them.
pub const ALL: [&str; 7] = ["convolve", "exact-trace", "two-proj", "reassemble", "radial", "weak-fc", "semicircular"];

/// Suites that need no Monte Carlo trials.
pub fn is_exact_only(suite: &str) -> bool {
    matches!(suite, "convolve" | "exact-trace" | "two-proj")
}

pub fn run_suite(suite: &str, cfg: &RunConfig) -> Result<SuiteResult> {
    match suite {
        "convolve" => convolve(cfg),
        "exact-trace" => exact_trace(cfg),
        "two-proj" => two_proj(cfg),
        "reassemble" => reassemble(cfg),
        "radial" => radial(cfg),
        "weak-fc" => weak_fc(cfg),
        "semicircular" => semicircular(cfg),
        other => bail!("unknown suite {other:?}"),
    }
}

const ATOM_TOL: f64 = 1e-3;
const MOMENT_TOL: f64 = 1e-6;
const ROUTE_TOL: f64 = 1e-8;
const MAX_MOMENT: u32 = 8;

fn one() -> Rational {
    Rational::from_integer(1.into())
}

/// Atoms, moments and both transform routes of the free sum of two
/// projections of trace alpha, with a random-matrix kernel cross-check.
fn convolve(cfg: &RunConfig) -> Result<SuiteResult> {
    let alpha = cfg.alpha();
    let a = rational_to_f64(&alpha);
    let g = FreeSumCauchy::new(&alpha)?;
    let mut checks = Vec::new();
    let expected = [(0.0, (1.0 - 2.0 * a).max(0.0)), (1.0, 0.0), (2.0, (2.0 * a - 1.0).max(0.0))];
    let mut atoms = Vec::new();
    for (x, m) in expected {
        let mass = atom_mass(&g, x, &DEFAULT_EPS_SCHEDULE)?;
        checks.push(Check::close(format!("atom at {x}"), mass, m, ATOM_TOL));
        atoms.push(json!({"location": x, "mass": mass}));
    }
    let numeric = moments_from_cauchy(&g, MAX_MOMENT as usize)?;
    let exact = projection_sum_moments(&alpha, &alpha, MAX_MOMENT)?;
    let worst = numeric.iter().zip(&exact).map(|(n, e)| (n - rational_to_f64(e)).abs()).fold(0.0, f64::max);
    checks.push(Check::at_most(format!("moments k <= {MAX_MOMENT} vs exact engine"), worst, MOMENT_TOL));
    let probes = [C64::new(0.5, 1.5), C64::new(1.0, 2.0), C64::new(3.0, 1.1), C64::new(-1.0, 1.2)];
    let mut route = 0.0f64;
    for z in probes {
        route = route.max((free_sum_cauchy(&alpha, z)? - free_sum_via_r_transform(&alpha, z)?).norm());
    }
    checks.push(Check::at_most("closed form vs R-transform inversion", route, ROUTE_TOL));

    // Largest dimension <= N at which alpha N is integral.
    let kernel_n = (2..=cfg.dim).rev().find(|&m| integral_rank(&alpha, m).is_ok_and(|r| r > 0));
    let mut kernel = Value::Null;
    if let Some(m) = kernel_n {
        let (p1, p2) = sample_projection_pair(&alpha, m, &mut stream(cfg.seed, "convolve/kernel", &[0]))?;
        let h = &p1 + &p2;
        let k0 = kernel_dimension(&h, 1e-8)? as f64 / m as f64;
        let k2 = kernel_dimension(&sub(&h, &scale(&identity(m), C64::new(2.0, 0.0))), 1e-8)? as f64 / m as f64;
        checks.push(Check::close(format!("kernel of P1+P2 at N = {m}"), k0, expected[0].1, 2.0 / m as f64));
        checks.push(Check::close(format!("eigenvalue 2 of P1+P2 at N = {m}"), k2, expected[2].1, 2.0 / m as f64));
        kernel = json!({"N": m, "kernel_fraction": k0, "top_fraction": k2});
    }
    let summary = format!(
        "alpha {alpha}: atom at 0 {:.2e}, atom at 1 {:.1e}, moment error {worst:.1e}",
        atoms[0]["mass"].as_f64().unwrap_or(f64::NAN),
        atoms[1]["mass"].as_f64().unwrap_or(f64::NAN)
    );
    let details = json!({"atoms": atoms, "moments": numeric, "exact_moments": exact.iter().map(|e| e.to_string()).collect::<Vec<_>>(), "kernel": kernel});
    Ok(SuiteResult::new("convolve", summary, checks, vec![], details))
}

/// Default word `p q p q` with free projections of trace alpha.
fn default_word(alpha: &Rational) -> Result<(AlgebraSet, FreeWord)> {
    let factor = |id| FiniteAbelianAlgebra::new(id, vec![alpha.clone(), one() - alpha]);
    let (a1, a2) = (factor(1)?, factor(2)?);
    let p = a1.projection::<GaussianRational>(&[0])?;
    let q = a2.projection::<GaussianRational>(&[0])?;
    Ok((AlgebraSet::new(vec![a1, a2])?, FreeWord::new(vec![p.clone(), q.clone(), p, q])))
}

fn exact_trace(cfg: &RunConfig) -> Result<SuiteResult> {
    let mut checks = Vec::new();
    let value = match &cfg.word {
        Some(text) => {
            let (set, word) = parse_word_literal(text)?;
            trace_word(&word, &set)?
        }
        None => {
            let alpha = cfg.alpha();
            let (set, word) = default_word(&alpha)?;
            let value = trace_word(&word, &set)?;
            // Closed form of tau(pqpq) with tau(p) = tau(q) = alpha.
            let a2 = &alpha * &alpha;
            let oracle = &a2 * &alpha * Rational::from_integer(2.into()) - &a2 * &a2;
            checks.push(Check::new(
                "tau(pqpq) closed form",
                value.to_string(),
                oracle.to_string(),
                value == GaussianRational::real(oracle.clone()),
            ));
            value
        }
    };
    let summary = format!("trace = {value}");
    let details = json!({"trace": value.to_string(), "numeric": [value.to_complex().re, value.to_complex().im]});
    Ok(SuiteResult::new("exact-trace", summary, checks, vec![], details))
}

fn two_proj(cfg: &RunConfig) -> Result<SuiteResult> {
    let alpha = cfg.alpha();
    let a = rational_to_f64(&alpha);
    let model = build_two_projection_model(&alpha, cfg.nodes)?;
    let mut checks = vec![Check::close("total mass", model.total_mass(), 1.0, 1e-8)];
    for w in ["p", "q"] {
        checks.push(Check::close(format!("tau({w})"), sign_unitary_moment(&model, w)?.value, a, 1e-8));
    }
    let exact = projection_sum_moments(&alpha, &alpha, 6)?;
    let worst =
        (1..=6u32).map(|k| (model.sum_moment(k) - rational_to_f64(&exact[k as usize - 1])).abs()).fold(0.0, f64::max);
    checks.push(Check::at_most("moments k <= 6 vs exact engine", worst, MOMENT_TOL));
    let uu = sign_unitary_moment(&model, "uu")?;
    checks.push(Check::close("tau(uu)", uu.value, 1.0, 1e-8));
    // u p u = q, so tau(u p u q) = tau(q) = alpha.
    let upuq = sign_unitary_moment(&model, "upuq")?;
    checks.push(Check::close("tau(upuq)", upuq.value, a, MOMENT_TOL));
    let summary = format!("alpha {alpha}: tau(upuq) = {:.9}, moment error {worst:.1e}", upuq.value);
    let details = json!({"nodes": model.nodes().len(), "upuq": upuq, "uu": uu,
        "sum_moments": (1..=6u32).map(|k| model.sum_moment(k)).collect::<Vec<_>>()});
    Ok(SuiteResult::new("two-proj", summary, checks, vec![], details))
}

fn reassemble(cfg: &RunConfig) -> Result<SuiteResult> {
    let spec = ReassemblySpec::new(cfg.trace_values(), cfg.unitary_mode())?;
    let (report, _) = reassembly_check(&spec, &cfg.options())?;
    let mut dims = Vec::with_capacity(cfg.gen_seeds);
    let mut warnings = Vec::new();
    for k in 0..cfg.gen_seeds as u64 {
        let re = build_reassembly(&spec, cfg.gen_dim, cfg.seed.wrapping_add(k))?;
        let names: Vec<String> = (1..=spec.n()).map(|i| format!("G{i}")).collect();
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        let g = generation_check(&re.scene, &names)?;
        if let Some(w) = g.warning {
            warnings.push(w);
        }
        dims.push(g.commutant_dimension);
    }
    let trivial = dims.iter().filter(|d| **d == 1).count();
    let checks = vec![
        Check::free(&report),
        Check::new(
            format!("commutant dimension at N = {}", cfg.gen_dim),
            &dims,
            "1 for every seed",
            trivial == dims.len(),
        ),
    ];
    let summary = format!(
        "{} patterns, max mean |tr| {:.4}, trivial commutant {trivial}/{}",
        report.rows.len(),
        report.max_mean(),
        dims.len()
    );
    let details = json!({"traces": cfg.traces, "commutant_dimensions": dims, "warnings": warnings});
    Ok(SuiteResult::new("reassemble", summary, checks, vec![report], details))
}

/// Smallest control mean accepted as a clear failure.
pub const CONTROL_MIN_MEAN: f64 = 0.2;

fn radial(cfg: &RunConfig) -> Result<SuiteResult> {
    let opts = cfg.options();
    let report = radial_check(cfg.n, cfg.i, cfg.j, &opts)?;
    let control = radial_control(cfg.n, &opts)?;
    let checks = vec![
        Check::free(&report),
        Check::control(&control),
        Check::new("control max mean", control.max_mean(), format!(">= {CONTROL_MIN_MEAN}"), control.max_mean() >= CONTROL_MIN_MEAN),
    ];
    let summary = format!("max mean |tr| {:.4}, control {:.3}", report.max_mean(), control.max_mean());
    Ok(SuiteResult::new("radial", summary, checks, vec![report, control], Value::Null))
}

fn weak_fc(cfg: &RunConfig) -> Result<SuiteResult> {
    let opts = cfg.options();
    let mut checks = Vec::new();
    let mut reports = Vec::new();
    let mut parts = Vec::new();
    for kind in cfg.kinds() {
        let r = weak_fc_check(kind, &opts)?;
        checks.push(Check::free(&r));
        parts.push(format!("{} {:.4}", r.label, r.max_mean()));
        reports.push(r);
    }
    let control = weak_fc_control(WeakFcKind::Product, WEAK_FC_CONTROL_OFFSET, &opts)?;
    checks.push(Check::control(&control));
    parts.push(format!("control {:.3}", control.max_mean()));
    reports.push(control);
    Ok(SuiteResult::new("weak-fc", parts.join(", "), checks, reports, Value::Null))
}

fn semicircular(cfg: &RunConfig) -> Result<SuiteResult> {
    let report = semicircular_perp_check(&cfg.t, &cfg.t_prime, &cfg.options())?;
    let summary = format!("t = {:?}, t' = {:?}, max mean |tr| {:.4}", cfg.t, cfg.t_prime, report.max_mean());
    Ok(SuiteResult::new("semicircular", summary, vec![Check::free(&report)], vec![report], Value::Null))
}
