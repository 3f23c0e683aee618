//! Seeded statistical suites built on [`freeness_test`].

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::freeness::{alternating_patterns, SlotRecipe, freeness_test, FreenessReport, VerdictRule, WordPattern};
use super::haar::{polar_sign_unitary, sample_haar_unitary, sample_projection_pair, MAX_SIGN_RETRIES};
use super::linalg::{adjoint, ginibre, hermitian_eigen, hermitian_part, identity, matmul, scale, CMat};
use super::reassembly::{build_reassembly, factor_sampler, Reassembly, ReassemblySpec};
use super::rng::stream;
use super::sampler::{ElementSampler, SpanSampler};
use super::scene::{MatrixScene, MatrixTag};
use super::RmtError;
use crate::numeric::compensated_sum;
use crate::{Rational, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    #[serde(rename = "N")]
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub max_len: usize,
    pub rule: VerdictRule,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { dim: 512, trials: 100, seed: 7, max_len: 6, rule: VerdictRule::default() }
    }
}

impl SuiteOptions {
    fn patterns(&self, families: usize) -> Vec<WordPattern> {
        alternating_patterns(families, 1, self.max_len)
    }
}

fn handles(samplers: Vec<SpanSampler>) -> Vec<Arc<dyn ElementSampler>> {
    samplers.into_iter().map(|s| Arc::new(s) as Arc<dyn ElementSampler>).collect()
}

fn require_even(n: usize) -> Result<(), RmtError> {
    if n < 2 || n % 2 != 0 {
        return Err(RmtError::InvalidArgument(format!("N must be even and at least 2, got {n}")));
    }
    Ok(())
}

/// Span of `x, x^2, ..., x^degree`.
pub fn polynomial_span(x: &CMat, degree: usize) -> Vec<CMat> {
    let mut out = vec![x.clone()];
    for _ in 1..degree {
        let next = matmul(out.last().expect("nonempty"), x);
        out.push(next);
    }
    out
}

/// Span of `v^{+-1}, ..., v^{+-degree}` for a unitary `v`.
pub fn unitary_power_span(v: &CMat, degree: usize) -> Vec<CMat> {
    let mut out = polynomial_span(v, degree);
    let inverse: Vec<CMat> = out.iter().map(adjoint).collect();
    out.extend(inverse);
    out
}

/// `U + U*`
fn real_part2(u: &CMat) -> CMat {
    u + adjoint(u)
}

/// `(U - U*) / 2i`
fn imaginary_part(u: &CMat) -> CMat {
    (u - adjoint(u)) * faer::Scale(C64::new(0.0, -0.5))
}

/// Haar unitary `U` with `W = sign(Im U)`, i.e. `g(e^{it}) = sign(sin t)`
/// applied spectrally. Resamples on a near-singular imaginary part.
fn haar_with_symmetry(seed: u64, label: &str, k: usize, n: usize) -> Result<(CMat, CMat), RmtError> {
    for attempt in 0..MAX_SIGN_RETRIES {
        let u = sample_haar_unitary(n, &mut stream(seed, label, &[k as u64, attempt as u64]));
        match polar_sign_unitary(&imaginary_part(&u)) {
            Ok(w) => return Ok((u, w)),
            Err(RmtError::NearSingular { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(RmtError::RetriesExhausted { what: format!("{label} sign unitary {k}"), attempts: MAX_SIGN_RETRIES })
}

struct RadialScene {
    scene: MatrixScene,
    r: CMat,
    v: CMat,
}

fn radial_scene(n_unitaries: usize, i: usize, j: usize, opts: &SuiteOptions) -> Result<RadialScene, RmtError> {
    if n_unitaries < 2 {
        return Err(RmtError::InvalidArgument("need at least two Haar unitaries".into()));
    }
    if i == j {
        return Err(RmtError::InvalidArgument("i and j must differ (V = W_i W_i is the identity)".into()));
    }
    if i == 0 || j == 0 || i > n_unitaries || j > n_unitaries {
        return Err(RmtError::InvalidArgument(format!("indices must lie in 1..={n_unitaries}")));
    }
    require_even(opts.dim)?;
    let n = opts.dim;
    let mut scene = MatrixScene::new(n, opts.seed);
    let mut r = CMat::zeros(n, n);
    let mut ws = Vec::with_capacity(n_unitaries);
    for k in 1..=n_unitaries {
        let (u, w) = haar_with_symmetry(opts.seed, "radial/haar", k, n)?;
        r += real_part2(&u);
        scene.insert(format!("U{k}"), MatrixTag::Unitary, u)?;
        scene.insert(format!("W{k}"), MatrixTag::Unitary, w.clone())?;
        ws.push(w);
    }
    let r = hermitian_part(&r);
    let v = matmul(&ws[i - 1], &ws[j - 1]);
    scene.insert("r", MatrixTag::SelfAdjoint, r.clone())?;
    scene.insert("V", MatrixTag::Unitary, v.clone())?;
    Ok(RadialScene { scene, r, v })
}

/// Radial element `r = sum (U_k + U_k*)` against `V = W_i W_j`.
pub fn radial_check(n_unitaries: usize, i: usize, j: usize, opts: &SuiteOptions) -> Result<FreenessReport, RmtError> {
    let rs = radial_scene(n_unitaries, i, j, opts)?;
    let families = handles(vec![
        SpanSampler::new("radial", polynomial_span(&rs.r, 3))?,
        SpanSampler::new("V", unitary_power_span(&rs.v, 3))?,
    ]);
    freeness_test(&rs.scene, "radial", &families, &opts.patterns(2), opts.trials, &opts.rule)
}

/// The radial algebra tested against itself; must fail.
pub fn radial_control(n_unitaries: usize, opts: &SuiteOptions) -> Result<FreenessReport, RmtError> {
    let rs = radial_scene(n_unitaries, 1, 2, opts)?;
    let families = handles(vec![
        SpanSampler::new("radial", polynomial_span(&rs.r, 3))?,
        SpanSampler::new("radial'", polynomial_span(&rs.r, 3))?,
    ]);
    freeness_test(&rs.scene, "radial-control", &families, &opts.patterns(2), opts.trials, &opts.rule)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeakFcKind {
    /// `u = w1 w2`
    Product,
    /// `u = w2 U1 w2*`
    Conjugated,
}

/// Offset of the in-`B_1` replacement `sign(C_1 / 2 + kappa)` used by the control.
pub const WEAK_FC_CONTROL_OFFSET: f64 = 0.9;

fn weak_fc_run(kind: WeakFcKind, control: Option<f64>, opts: &SuiteOptions) -> Result<FreenessReport, RmtError> {
    require_even(opts.dim)?;
    let n = opts.dim;
    let mut scene = MatrixScene::new(n, opts.seed);
    let (u1, w1) = haar_with_symmetry(opts.seed, "weak-fc/haar", 1, n)?;
    let (u2, w2) = haar_with_symmetry(opts.seed, "weak-fc/haar", 2, n)?;
    let c1 = hermitian_part(&real_part2(&u1));
    let c2 = hermitian_part(&real_part2(&u2));
    let w1 = match control {
        None => w1,
        Some(kappa) => {
            let shifted = &c1 * faer::Scale(C64::new(0.5, 0.0)) + identity(n) * faer::Scale(C64::new(kappa, 0.0));
            polar_sign_unitary(&hermitian_part(&shifted))?
        }
    };
    let u = match kind {
        WeakFcKind::Product => matmul(&w1, &w2),
        WeakFcKind::Conjugated => matmul(&matmul(&w2, &u1), &adjoint(&w2)),
    };
    let powers1 = polynomial_span(&c1, 3);
    let powers2 = polynomial_span(&c2, 3);
    let mut joint: Vec<CMat> = powers1.iter().chain(&powers2).cloned().collect();
    for a in &powers1 {
        for b in &powers2 {
            joint.push(matmul(a, b));
            joint.push(matmul(b, a));
        }
    }
    scene.insert("U1", MatrixTag::Unitary, u1)?;
    scene.insert("U2", MatrixTag::Unitary, u2)?;
    scene.insert("w1", MatrixTag::Unitary, w1)?;
    scene.insert("w2", MatrixTag::Unitary, w2)?;
    scene.insert("u", MatrixTag::Unitary, u.clone())?;
    scene.insert("u^2", MatrixTag::Unitary, matmul(&u, &u))?;
    scene.insert("C1^2C2^2", MatrixTag::General, matmul(&powers1[1], &powers2[1]))?;
    let mut patterns = opts.patterns(2);
    for len in [2, 4] {
        let tags: Vec<usize> = (0..len).map(|k| 1 + k % 2).collect();
        let recipes = tags
            .iter()
            .map(|t| SlotRecipe::Specific(if *t == 1 { "u^2" } else { "C1^2C2^2" }.to_string()))
            .collect();
        patterns.push(WordPattern::with_recipes(tags, recipes)?);
    }
    let families = handles(vec![SpanSampler::new("u", unitary_power_span(&u, 3))?, SpanSampler::new("B1vB2", joint)?]);
    let label = match (kind, control) {
        (WeakFcKind::Product, None) => "weak-fc-product",
        (WeakFcKind::Conjugated, None) => "weak-fc-conjugated",
        (WeakFcKind::Product, Some(_)) => "weak-fc-product-control",
        (WeakFcKind::Conjugated, Some(_)) => "weak-fc-conjugated-control",
    };
    freeness_test(&scene, label, &families, &patterns, opts.trials, &opts.rule)
}

/// `{u}''` against the algebra generated by `B_k = {C_k}''`, `C_k = U_k + U_k*`.
/// Besides random alternating words, the fixed probes `(u^2, C_1^2 C_2^2)` of
/// lengths 2 and 4 are included.
pub fn weak_fc_check(kind: WeakFcKind, opts: &SuiteOptions) -> Result<FreenessReport, RmtError> {
    weak_fc_run(kind, None, opts)
}

/// Same suite with `w_1` replaced by `sign(C_1 / 2 + kappa)`, an element of `B_1`; must fail.
pub fn weak_fc_control(kind: WeakFcKind, kappa: f64, opts: &SuiteOptions) -> Result<FreenessReport, RmtError> {
    weak_fc_run(kind, Some(kappa), opts)
}

/// GUE matrix normalized so its spectrum fills `[-2, 2]`.
pub fn sample_gue(n: usize, seed: u64, index: u64) -> CMat {
    let x = ginibre(n, n, &mut stream(seed, "semicircular/gue", &[index]));
    hermitian_part(&scale(&(&x + adjoint(&x)), C64::new(1.0 / (2.0 * n as f64).sqrt(), 0.0)))
}

/// `s(t) = sum t_k s_k` against `s(t')` for independent GUE `s_k`.
pub fn semicircular_perp_check(t: &[f64], t_prime: &[f64], opts: &SuiteOptions) -> Result<FreenessReport, RmtError> {
    if t.len() != t_prime.len() || t.is_empty() {
        return Err(RmtError::InvalidArgument("t and t' must be nonempty and of equal length".into()));
    }
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (nt, np) = (norm(t), norm(t_prime));
    if nt == 0.0 || np == 0.0 {
        return Err(RmtError::InvalidArgument("t and t' must be nonzero".into()));
    }
    let inner: f64 = t.iter().zip(t_prime).map(|(a, b)| a * b).sum();
    if inner.abs() > 1e-12 * nt * np {
        return Err(RmtError::NotPerpendicular { inner });
    }
    let n = opts.dim;
    let mut scene = MatrixScene::new(n, opts.seed);
    let mut s = CMat::zeros(n, n);
    let mut sp = CMat::zeros(n, n);
    for (k, (a, b)) in t.iter().zip(t_prime).enumerate() {
        let g = sample_gue(n, opts.seed, k as u64);
        s += &g * faer::Scale(C64::new(*a, 0.0));
        sp += &g * faer::Scale(C64::new(*b, 0.0));
        scene.insert(format!("s{}", k + 1), MatrixTag::SelfAdjoint, g)?;
    }
    scene.insert("s(t)", MatrixTag::SelfAdjoint, hermitian_part(&s))?;
    scene.insert("s(t')", MatrixTag::SelfAdjoint, hermitian_part(&sp))?;
    let families = handles(vec![
        SpanSampler::new("s(t)", polynomial_span(&s, 3))?,
        SpanSampler::new("s(t')", polynomial_span(&sp, 3))?,
    ]);
    freeness_test(&scene, "semicircular", &families, &opts.patterns(2), opts.trials, &opts.rule)
}

/// Reassembled algebras of `spec` against each other.
pub fn reassembly_check(spec: &ReassemblySpec, opts: &SuiteOptions) -> Result<(FreenessReport, Reassembly), RmtError> {
    let re = build_reassembly(spec, opts.dim, opts.seed)?;
    let report = freeness_test(
        &re.scene,
        "reassembly",
        &re.sampler_handles(),
        &opts.patterns(spec.n()),
        opts.trials,
        &opts.rule,
    )?;
    Ok((report, re))
}

fn original_factors(n: usize, seed: u64) -> Result<(MatrixScene, Vec<Arc<dyn ElementSampler>>), RmtError> {
    let mut scene = MatrixScene::new(n, seed);
    let mut samplers = Vec::new();
    for k in 1..=2u64 {
        let u = sample_haar_unitary(n, &mut stream(seed, "factors/haar", &[k]));
        samplers.push(factor_sampler(&format!("factor{k}"), &u, &[1, 2, 3])?);
        scene.insert(format!("U{k}"), MatrixTag::Unitary, u)?;
    }
    Ok((scene, handles(samplers)))
}

/// Two diagonal factors in independent Haar frames.
pub fn factors_check(opts: &SuiteOptions) -> Result<FreenessReport, RmtError> {
    let (scene, families) = original_factors(opts.dim, opts.seed)?;
    freeness_test(&scene, "factors", &families, &opts.patterns(2), opts.trials, &opts.rule)
}

/// The first factor tested against itself; must fail.
pub fn factors_alias_control(opts: &SuiteOptions) -> Result<FreenessReport, RmtError> {
    let (scene, families) = original_factors(opts.dim, opts.seed)?;
    let aliased = vec![families[0].clone(), families[0].clone()];
    freeness_test(&scene, "factors-alias", &aliased, &opts.patterns(2), opts.trials, &opts.rule)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasPoint {
    #[serde(rename = "N")]
    pub n: usize,
    pub mean_abs_trace: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasScaling {
    pub pattern: String,
    pub points: Vec<BiasPoint>,
    /// Least-squares slope of `log mean` against `log N`.
    pub slope: f64,
}

/// Mean |trace| of the pattern (1,2,1,2) on the original factors across dimensions.
pub fn bias_scaling(dims: &[usize], trials: usize, seed: u64) -> Result<BiasScaling, RmtError> {
    if dims.len() < 2 {
        return Err(RmtError::InvalidArgument("need at least two dimensions".into()));
    }
    let pattern = WordPattern::new(vec![1, 2, 1, 2])?;
    let mut points = Vec::new();
    for &n in dims {
        let (scene, families) = original_factors(n, seed)?;
        let report = freeness_test(&scene, "bias", &families, &[pattern.clone()], trials, &VerdictRule::default())?;
        let row = &report.rows[0];
        points.push(BiasPoint { n, mean_abs_trace: row.mean_abs_trace, stderr: row.stderr });
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.mean_abs_trace.ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(BiasScaling { pattern: pattern.to_string(), points, slope: sxy / sxx })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub k: usize,
    pub mean: f64,
    pub stderr: f64,
}

/// Spectrum of `P_1 + P_2` for one sampled projection pair.
pub fn projection_sum_spectrum(alpha: &Rational, n: usize, seed: u64, trial: u64) -> Result<Vec<f64>, RmtError> {
    let (p1, p2) = sample_projection_pair(alpha, n, &mut stream(seed, "projection-pair", &[trial]))?;
    Ok(hermitian_eigen(&(&p1 + &p2))?.0)
}

/// `tau((P_1 + P_2)^k)` for `k = 1..=max_k`, averaged over independent trials.
pub fn projection_sum_moments(
    alpha: &Rational,
    n: usize,
    trials: usize,
    max_k: usize,
    seed: u64,
) -> Result<Vec<MomentEstimate>, RmtError> {
    if trials < 2 {
        return Err(RmtError::InvalidArgument("need at least two trials".into()));
    }
    let per_trial: Vec<Vec<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let spec = projection_sum_spectrum(alpha, n, seed, t)?;
            Ok((1..=max_k as i32).map(|k| compensated_sum(spec.iter().map(|x| x.powi(k))) / n as f64).collect())
        })
        .collect::<Result<_, RmtError>>()?;
    Ok((0..max_k)
        .map(|k| {
            let xs: Vec<f64> = per_trial.iter().map(|t| t[k]).collect();
            let mean = compensated_sum(xs.iter().copied()) / trials as f64;
            let var = compensated_sum(xs.iter().map(|x| (x - mean) * (x - mean))) / (trials as f64 - 1.0);
            MomentEstimate { k: k + 1, mean, stderr: (var / trials as f64).sqrt() }
        })
        .collect())
}
