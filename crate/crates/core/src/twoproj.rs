//! Two free projections of equal trace `alpha <= 1/2` and the sign unitary
//! `u = sign(p + q - 1)`, realized as a direct integral of 2x2 blocks.
//!
//! On the block at angle `t`, `p = [[1, 0], [0, 0]]` and
//! `q = [[cos^2 t, cos t sin t], [cos t sin t, sin^2 t]]`, so `p + q` has
//! eigenvalues `1 +- cos t`. The block weights come from the density of the
//! law of `p + q`; the remaining mass `1 - 2 alpha` sits on a block where
//! `p = q = 0` and `u = -1`.

use std::f64::consts::FRAC_PI_4;

use num_traits::{One, Signed};
use serde::Serialize;
use thiserror::Error;

use crate::measures::{
    atom_mass, density_at, moments_from_cauchy, FreeSumCauchy, MeasureError,
    DEFAULT_EPS_SCHEDULE,
};
use crate::numeric::{gauss_legendre, CompensatedSum};
use crate::{rational_to_f64, Rational};

pub const DEFAULT_NODE_COUNT: usize = 256;
pub const MIN_NODE_COUNT: usize = 16;
pub const MAX_WORD_LEN: usize = 12;
pub const SINGULARITY_FLOOR: f64 = 1e-10;

const MASS_TOLERANCE: f64 = 1e-8;
const MOMENT_TOLERANCE: f64 = 1e-5;
const ATOM_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TwoProjError {
    #[error("alpha = {0} is outside (0, 1/2]")]
    InvalidAlpha(String),
    #[error("node count {0} is below the minimum {MIN_NODE_COUNT}")]
    TooFewNodes(usize),
    #[error("calibration failure: {0}")]
    Calibration(String),
    #[error("block at t = {t} has eigenvalue {eigenvalue} below the singularity floor")]
    Singular { t: f64, eigenvalue: f64 },
    #[error("word has {0} letters; at most {MAX_WORD_LEN} are supported")]
    WordTooLong(usize),
    #[error("invalid word {0:?}: use the letters p, q, u")]
    InvalidWord(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

pub type Mat2 = [[f64; 2]; 2];

fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

/// `sign(x)` of a real symmetric 2x2 matrix.
fn sign2(x: &Mat2, t: f64) -> Result<Mat2, TwoProjError> {
    let half_tr = 0.5 * (x[0][0] + x[1][1]);
    let det = x[0][0] * x[1][1] - x[0][1] * x[1][0];
    let disc = (half_tr * half_tr - det).max(0.0).sqrt();
    let (lo, hi) = (half_tr - disc, half_tr + disc);
    let smallest = lo.abs().min(hi.abs());
    if smallest < SINGULARITY_FLOOR {
        return Err(TwoProjError::Singular { t, eigenvalue: smallest });
    }
    if lo > 0.0 {
        return Ok([[1.0, 0.0], [0.0, 1.0]]);
    }
    if hi < 0.0 {
        return Ok([[-1.0, 0.0], [0.0, -1.0]]);
    }
    // Spectral projections onto the two eigenvalues give (2x - (lo + hi)) / (hi - lo).
    let s = hi - lo;
    Ok([
        [(2.0 * x[0][0] - (lo + hi)) / s, 2.0 * x[0][1] / s],
        [2.0 * x[1][0] / s, (2.0 * x[1][1] - (lo + hi)) / s],
    ])
}

/// The 2x2 realizations at angle `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodeMatrices {
    pub p: Mat2,
    pub q: Mat2,
    /// `p + q - 1`
    pub x: Mat2,
    pub u: Mat2,
}

impl NodeMatrices {
    pub fn at(t: f64) -> Result<Self, TwoProjError> {
        let (s, c) = t.sin_cos();
        let p = [[1.0, 0.0], [0.0, 0.0]];
        let q = [[c * c, c * s], [c * s, s * s]];
        let x = [[p[0][0] + q[0][0] - 1.0, q[0][1]], [q[1][0], q[1][1] - 1.0]];
        let u = sign2(&x, t)?;
        Ok(Self { p, q, x, u })
    }
}

/// One block of the direct integral.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AngleNode {
    pub t: f64,
    pub weight: f64,
}

/// A one-dimensional block where `p`, `q` and `u` are scalars.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AtomBlock {
    pub label: String,
    pub mass: f64,
    pub p: f64,
    pub q: f64,
    pub u: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Letter {
    P,
    Q,
    U,
}

pub fn parse_word(word: &str) -> Result<Vec<Letter>, TwoProjError> {
    let letters = word
        .chars()
        .filter(|c| !c.is_whitespace() && *c != '*' && *c != '.')
        .map(|c| match c {
            'p' => Ok(Letter::P),
            'q' => Ok(Letter::Q),
            'u' => Ok(Letter::U),
            _ => Err(TwoProjError::InvalidWord(word.to_string())),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if letters.is_empty() {
        return Err(TwoProjError::InvalidWord(word.to_string()));
    }
    if letters.len() > MAX_WORD_LEN {
        return Err(TwoProjError::WordTooLong(letters.len()));
    }
    Ok(letters)
}

/// A quadrature value with an error estimate from a half-size rule.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub word: String,
    pub value: f64,
    pub est_error: f64,
}

#[derive(Clone, Debug)]
pub struct TwoProjectionModel {
    alpha: Rational,
    nodes: Vec<AngleNode>,
    coarse_nodes: Vec<AngleNode>,
    atoms: Vec<AtomBlock>,
}

/// Blocks from Gauss-Legendre in `phi`, where `cos t = b sin phi`. The
/// substitution turns the law of `cos t` into a smooth density in `phi`.
fn angle_nodes(g: &FreeSumCauchy, n: usize) -> Vec<AngleNode> {
    let b = g.half_width();
    let (xi, w) = gauss_legendre(n);
    xi.iter()
        .zip(&w)
        .map(|(&xi, &w)| {
            let phi = FRAC_PI_4 * (xi + 1.0);
            let (sin_phi, cos_phi) = phi.sin_cos();
            let sigma = b * sin_phi;
            // Keep the inversion offset far below the distance to the edge.
            let eps = (1e-10 * b * (1.0 - sin_phi)).max(1e-300);
            let f = density_at(g, 1.0 + sigma, eps, &[]);
            // Each block carries the two eigenvalues 1 +- sigma with equal mass.
            let weight = w * FRAC_PI_4 * 2.0 * f * b * cos_phi;
            AngleNode { t: sigma.acos(), weight }
        })
        .collect()
}

/// Builds and calibrates the model.
pub fn build_two_projection_model(alpha: &Rational, node_count: usize) -> Result<TwoProjectionModel, TwoProjError> {
    let half = Rational::new(1.into(), 2.into());
    if !alpha.is_positive() || *alpha > half {
        return Err(TwoProjError::InvalidAlpha(alpha.to_string()));
    }
    if node_count < MIN_NODE_COUNT {
        return Err(TwoProjError::TooFewNodes(node_count));
    }
    let g = FreeSumCauchy::new(alpha)?;
    let a = rational_to_f64(alpha);
    let kernel_mass = Rational::one() - alpha * Rational::from_integer(2.into());
    let kernel_f = rational_to_f64(&kernel_mass);

    let at0 = atom_mass(&g, 0.0, &DEFAULT_EPS_SCHEDULE)?;
    if (at0 - kernel_f).abs() > ATOM_TOLERANCE {
        return Err(TwoProjError::Calibration(format!(
            "atom of p + q at 0 is {at0}, expected {kernel_f}"
        )));
    }
    let at1 = atom_mass(&g, 1.0, &DEFAULT_EPS_SCHEDULE)?;
    if at1 > ATOM_TOLERANCE {
        return Err(TwoProjError::Calibration(format!("p + q - 1 has an atom of mass {at1} at 0")));
    }

    let mut atoms = Vec::new();
    if kernel_mass.is_positive() {
        atoms.push(AtomBlock { label: "ker p & ker q".into(), mass: kernel_f, p: 0.0, q: 0.0, u: -1.0 });
    }
    let model = TwoProjectionModel {
        alpha: alpha.clone(),
        nodes: angle_nodes(&g, node_count),
        coarse_nodes: angle_nodes(&g, node_count / 2),
        atoms,
    };

    let total = model.total_mass();
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(TwoProjError::Calibration(format!("total mass {total} differs from 1")));
    }
    let tau_p = model.moment(&[Letter::P])?.value;
    if (tau_p - a).abs() > MASS_TOLERANCE {
        return Err(TwoProjError::Calibration(format!("tau(p) = {tau_p}, expected {a}")));
    }
    let reference = moments_from_cauchy(&g, 6)?;
    for (k, m) in reference.iter().enumerate() {
        let mk = model.sum_moment(k as u32 + 1);
        if (mk - m).abs() > MOMENT_TOLERANCE {
            return Err(TwoProjError::Calibration(format!(
                "moment {} of p + q is {mk}, transform gives {m}",
                k + 1
            )));
        }
    }
    Ok(model)
}

impl TwoProjectionModel {
    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn nodes(&self) -> &[AngleNode] {
        &self.nodes
    }

    pub fn atoms(&self) -> &[AtomBlock] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        let mut s = CompensatedSum::new();
        self.nodes.iter().for_each(|n| s.add(n.weight));
        self.atoms.iter().for_each(|a| s.add(a.mass));
        s.value()
    }

    /// `tau((p + q)^k)` from the blocks.
    pub fn sum_moment(&self, k: u32) -> f64 {
        let mut s = CompensatedSum::new();
        for n in &self.nodes {
            let c = n.t.cos();
            s.add(n.weight * 0.5 * ((1.0 + c).powi(k as i32) + (1.0 - c).powi(k as i32)));
        }
        for a in &self.atoms {
            s.add(a.mass * (a.p + a.q).powi(k as i32));
        }
        s.value()
    }

    fn integrate(&self, nodes: &[AngleNode], letters: &[Letter]) -> Result<f64, TwoProjError> {
        let mut s = CompensatedSum::new();
        for n in nodes {
            let m = NodeMatrices::at(n.t)?;
            let mut prod = [[1.0, 0.0], [0.0, 1.0]];
            for l in letters {
                let f = match l {
                    Letter::P => &m.p,
                    Letter::Q => &m.q,
                    Letter::U => &m.u,
                };
                prod = mul2(&prod, f);
            }
            s.add(n.weight * 0.5 * (prod[0][0] + prod[1][1]));
        }
        for a in &self.atoms {
            let v: f64 = letters
                .iter()
                .map(|l| match l {
                    Letter::P => a.p,
                    Letter::Q => a.q,
                    Letter::U => a.u,
                })
                .product();
            s.add(a.mass * v);
        }
        Ok(s.value())
    }

    /// Trace of a word over `{p, q, u}`, with the difference to a half-size
    /// rule as the error estimate.
    pub fn moment(&self, letters: &[Letter]) -> Result<MomentEstimate, TwoProjError> {
        if letters.is_empty() {
            return Err(TwoProjError::InvalidWord(String::new()));
        }
        if letters.len() > MAX_WORD_LEN {
            return Err(TwoProjError::WordTooLong(letters.len()));
        }
        let value = self.integrate(&self.nodes, letters)?;
        let coarse = self.integrate(&self.coarse_nodes, letters)?;
        let word = letters
            .iter()
            .map(|l| match l {
                Letter::P => 'p',
                Letter::Q => 'q',
                Letter::U => 'u',
            })
            .collect();
        Ok(MomentEstimate { word, value, est_error: (value - coarse).abs() })
    }
}

/// Trace of a word such as `"upuq"` in the model.
pub fn sign_unitary_moment(model: &TwoProjectionModel, word: &str) -> Result<MomentEstimate, TwoProjError> {
    model.moment(&parse_word(word)?)
}
