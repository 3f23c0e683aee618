//! Free reassembly of abelian factors: each factor is a diagonal algebra in
//! an independent Haar frame, and pieces of the factors are swapped through
//! the sign unitaries `u_i = sign(p_i + q_i - 1)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::haar::{build_intertwiner, MAX_SIGN_RETRIES, integral_rank, polar_sign_unitary, range_projection, sample_haar_unitary};
use super::linalg::{adjoint, conjugate_real_diagonal, hstack, identity, select_columns, CMat};
use super::rng::stream;
use super::sampler::SpanSampler;
use super::scene::{MatrixScene, MatrixTag};
use super::RmtError;
use crate::numeric::legendre;
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitaryMode {
    /// `u_i = sign(p_i + q_i - 1)`.
    Structured,
    /// `v_i = h_i u_i` with `h_i` Haar on the range of `q_i`.
    Haar,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReassemblySpec {
    traces: Vec<Rational>,
    mode: UnitaryMode,
}

impl ReassemblySpec {
    /// Traces `tau(p_i)` must lie in `[0, 1]` and sum to exactly 1.
    pub fn new(traces: Vec<Rational>, mode: UnitaryMode) -> Result<Self, RmtError> {
        if traces.len() < 2 {
            return Err(RmtError::InvalidArgument("need at least two factors".into()));
        }
        let zero = Rational::from_integer(0.into());
        let one = Rational::from_integer(1.into());
        if let Some(t) = traces.iter().find(|t| **t < zero || **t > one) {
            return Err(RmtError::InvalidArgument(format!("trace {t} outside [0, 1]")));
        }
        let total: Rational = traces.iter().sum();
        if total != one {
            return Err(RmtError::InvalidArgument(format!("traces sum to {total}, not 1")));
        }
        Ok(Self { traces, mode })
    }

    pub fn n(&self) -> usize {
        self.traces.len()
    }

    pub fn traces(&self) -> &[Rational] {
        &self.traces
    }

    pub fn mode(&self) -> UnitaryMode {
        self.mode
    }

    /// Ranks `tau(p_i) N`, all integral.
    pub fn ranks(&self, n: usize) -> Result<Vec<usize>, RmtError> {
        self.traces.iter().map(|t| integral_rank(t, n)).collect()
    }
}

/// Spanning functions of a diagonal algebra restricted to a block of frame
/// columns: the block indicator and the first two Legendre polynomials of a
/// local coordinate in `(-1, 1)`.
pub fn piece_functions(block: &CMat, degrees: &[usize]) -> Vec<CMat> {
    let m = block.ncols();
    degrees
        .iter()
        .map(|&k| {
            let d: Vec<f64> = (0..m).map(|j| legendre(k, 2.0 * (j as f64 + 0.5) / m as f64 - 1.0)).collect();
            conjugate_real_diagonal(block, &d)
        })
        .collect()
}

/// `frame diag(0, 1/N, ..., (N-1)/N) frame*`: generates the whole diagonal algebra.
pub fn distinct_generator(frame: &CMat) -> CMat {
    let n = frame.ncols();
    let d: Vec<f64> = (0..n).map(|j| j as f64 / n as f64).collect();
    conjugate_real_diagonal(frame, &d)
}

/// Original factor `U diag(P_k(x_j)) U*` for `k in degrees`, `x_j` spread over `(-1, 1)`.
pub fn factor_sampler(label: &str, frame: &CMat, degrees: &[usize]) -> Result<SpanSampler, RmtError> {
    SpanSampler::new(label, piece_functions(frame, degrees))
}

/// Everything built by [`build_reassembly`].
pub struct Reassembly {
    pub spec: ReassemblySpec,
    pub scene: MatrixScene,
    pub ranks: Vec<usize>,
    /// Orthonormal frames diagonalizing the reassembled algebras.
    pub frames: Vec<CMat>,
    /// Random-element samplers of the reassembled algebras.
    pub samplers: Vec<Arc<SpanSampler>>,
    /// Random-element samplers of the original factors.
    pub factors: Vec<Arc<SpanSampler>>,
    /// One self-adjoint generator per reassembled algebra.
    pub generators: Vec<CMat>,
}

impl Reassembly {
    pub fn sampler_handles(&self) -> Vec<Arc<dyn super::ElementSampler>> {
        self.samplers.iter().map(|s| s.clone() as Arc<dyn super::ElementSampler>).collect()
    }

    pub fn factor_handles(&self) -> Vec<Arc<dyn super::ElementSampler>> {
        self.factors.iter().map(|s| s.clone() as Arc<dyn super::ElementSampler>).collect()
    }
}

fn range(start: usize, len: usize) -> Vec<usize> {
    (start..start + len).collect()
}

/// Builds factor frames `U_i`, projections `p_i` (first `r_i` columns of
/// `U_i`), a partition `q_i` of the first frame with `q_1 = p_1`, the sign
/// unitaries and the reassembled algebras
/// `A'_1 = A_1 q_1 + sum_{i>=2} v_i A_i p_i v_i*` and
/// `A'_i = A_i (1 - p_i) + v_i* A_1 q_i v_i`.
pub fn build_reassembly(spec: &ReassemblySpec, n: usize, seed: u64) -> Result<Reassembly, RmtError> {
    let ranks = spec.ranks(n)?;
    let k = spec.n();
    let mut scene = MatrixScene::new(n, seed);
    let mut offsets = vec![0usize; k];
    for i in 1..k {
        offsets[i] = offsets[i - 1] + ranks[i - 1];
    }

    let first = sample_haar_unitary(n, &mut stream(seed, "reassembly/factor", &[0, 0]));
    let q_cols: Vec<Vec<usize>> = (0..k).map(|i| range(offsets[i], ranks[i])).collect();
    let qs: Vec<CMat> = q_cols.iter().map(|c| range_projection(&select_columns(&first, c))).collect();

    let mut frames_u = vec![first.clone()];
    let mut ps = vec![qs[0].clone()];
    let mut us = vec![identity(n)];
    for i in 1..k {
        let mut attempt = 0;
        let (frame, p, u) = loop {
            let frame = sample_haar_unitary(n, &mut stream(seed, "reassembly/factor", &[i as u64, attempt as u64]));
            let p = range_projection(&select_columns(&frame, &range(0, ranks[i])));
            let x = &p + &qs[i] - identity(n);
            match polar_sign_unitary(&x) {
                Ok(u) => break (frame, p, u),
                Err(RmtError::NearSingular { .. }) if attempt + 1 < MAX_SIGN_RETRIES => attempt += 1,
                Err(RmtError::NearSingular { .. }) => {
                    return Err(RmtError::RetriesExhausted { what: format!("sign unitary u{}", i + 1), attempts: MAX_SIGN_RETRIES })
                }
                Err(e) => return Err(e),
            }
        };
        frames_u.push(frame);
        ps.push(p);
        us.push(u);
    }

    let vs: Vec<CMat> = match spec.mode {
        UnitaryMode::Structured => us.clone(),
        UnitaryMode::Haar => (0..k)
            .map(|i| {
                if ranks[i] == 0 {
                    return us[i].clone();
                }
                let block = select_columns(&first, &q_cols[i]);
                let local = sample_haar_unitary(ranks[i], &mut stream(seed, "reassembly/haar", &[i as u64]));
                let h = &block * &local * block.adjoint() + identity(n) - &qs[i];
                &h * &us[i]
            })
            .collect(),
    };

    // Frames of the reassembled algebras.
    let mut frames = Vec::with_capacity(k);
    let first_blocks: Vec<CMat> = (0..k)
        .map(|i| &vs[i] * select_columns(&frames_u[i], &range(0, ranks[i])))
        .collect();
    frames.push(hstack(&first_blocks));
    let mut pieces: Vec<Vec<CMat>> = vec![first_blocks];
    for i in 1..k {
        let own = select_columns(&frames_u[i], &range(ranks[i], n - ranks[i]));
        let swapped = adjoint(&vs[i]) * select_columns(&first, &q_cols[i]);
        frames.push(hstack(&[own.clone(), swapped.clone()]));
        pieces.push(vec![own, swapped]);
    }

    for i in 0..k {
        let t = i + 1;
        scene.insert(format!("U{t}"), MatrixTag::Unitary, frames_u[i].clone())?;
        scene.insert(format!("p{t}"), MatrixTag::Projection, ps[i].clone())?;
        scene.insert(format!("q{t}"), MatrixTag::Projection, qs[i].clone())?;
        scene.insert(format!("u{t}"), MatrixTag::Unitary, us[i].clone())?;
        scene.insert(format!("frame{t}"), MatrixTag::Unitary, frames[i].clone())?;
    }
    if spec.mode == UnitaryMode::Haar {
        for (i, v) in vs.iter().enumerate() {
            scene.insert(format!("v{}", i + 1), MatrixTag::Unitary, v.clone())?;
        }
        let w = build_intertwiner(&ps, &us, &vs)?;
        scene.insert("w", MatrixTag::Unitary, w)?;
    }

    let degrees = [0, 1, 2];
    let mut samplers = Vec::with_capacity(k);
    let mut generators = Vec::with_capacity(k);
    for (i, blocks) in pieces.iter().enumerate() {
        let basis: Vec<CMat> =
            blocks.iter().filter(|b| b.ncols() > 0).flat_map(|b| piece_functions(b, &degrees)).collect();
        samplers.push(Arc::new(SpanSampler::new(format!("reassembled{}", i + 1), basis)?));
        let g = distinct_generator(&frames[i]);
        scene.insert(format!("G{}", i + 1), MatrixTag::SelfAdjoint, g.clone())?;
        generators.push(g);
    }
    let factors = frames_u
        .iter()
        .enumerate()
        .map(|(i, f)| factor_sampler(&format!("factor{}", i + 1), f, &[1, 2, 3]).map(Arc::new))
        .collect::<Result<Vec<_>, _>>()?;
    scene.check_invariants()?;
    Ok(Reassembly { spec: spec.clone(), scene, ranks, frames, samplers, factors, generators })
}

