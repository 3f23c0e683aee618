//! Random elements of a subalgebra, drawn from a fixed spanning set.

use rand::Rng;
use rand_distr::StandardNormal;

use super::linalg::{centered, linear_combination, norm2_normalized, scale, CMat};
use super::rng::StreamRng;
use super::RmtError;
use crate::C64;

/// Draws elements of one subalgebra. Sampling must be a deterministic
/// function of the generator state.
pub trait ElementSampler: Send + Sync {
    fn sample(&self, rng: &mut StreamRng) -> CMat;
    fn label(&self) -> &str;
    fn dim(&self) -> usize;
}

/// Random real Gaussian combinations of fixed matrices. Basis elements are
/// centered and normalized to `tau(b* b) = 1` at construction.
#[derive(Clone, Debug)]
pub struct SpanSampler {
    label: String,
    basis: Vec<CMat>,
}

impl SpanSampler {
    pub fn new(label: impl Into<String>, basis: Vec<CMat>) -> Result<Self, RmtError> {
        let label = label.into();
        if basis.is_empty() {
            return Err(RmtError::InvalidArgument(format!("{label}: empty spanning set")));
        }
        let n = basis[0].nrows();
        let mut normalized = Vec::with_capacity(basis.len());
        for b in basis {
            if b.nrows() != n || b.ncols() != n {
                return Err(RmtError::InvalidArgument(format!("{label}: mixed dimensions")));
            }
            let c = centered(&b);
            let norm = norm2_normalized(&c).sqrt();
            // Scalars carry no centered part; skip them.
            if norm > 1e-12 {
                normalized.push(scale(&c, C64::new(1.0 / norm, 0.0)));
            }
        }
        if normalized.is_empty() {
            return Err(RmtError::InvalidArgument(format!("{label}: spanning set is scalar")));
        }
        Ok(Self { label, basis: normalized })
    }

    pub fn basis(&self) -> &[CMat] {
        &self.basis
    }
}

impl ElementSampler for SpanSampler {
    fn sample(&self, rng: &mut StreamRng) -> CMat {
        let coeffs: Vec<f64> = (0..self.basis.len()).map(|_| rng.sample(StandardNormal)).collect();
        linear_combination(&self.basis, &coeffs)
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn dim(&self) -> usize {
        self.basis[0].nrows()
    }
}

/// Centers a sample by its own normalized trace and scales it to unit
/// 2-norm; `None` if the centered part vanishes.
pub fn center_and_normalize(a: &CMat) -> Option<CMat> {
    let c = centered(a);
    let norm = norm2_normalized(&c).sqrt();
    (norm > 1e-12).then(|| scale(&c, C64::new(1.0 / norm, 0.0)))
}
