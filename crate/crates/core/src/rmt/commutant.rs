//! Commutant dimension of a generating set: the nullity of the stacked
//! commutation operator `X -> [X, G]`. A trivial commutant (dimension 1)
//! means the set generates the full matrix algebra.

use serde::{Deserialize, Serialize};

use super::linalg::{adjoint, frobenius, hermitian_eigen, CMat};
use super::scene::MatrixScene;
use super::RmtError;
use crate::C64;

/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOLERANCE: f64 = 1e-8;
/// Singular values within this band around the tolerance trigger a warning.
const WARN_LOW: f64 = 1e-10;
const WARN_HIGH: f64 = 1e-6;
/// Largest dimension accepted by the dense Kronecker oracle.
pub const BRUTE_FORCE_MAX_N: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationReport {
    pub commutant_dimension: usize,
    /// Unknowns left after block-diagonalizing by the first generator.
    pub unknowns: usize,
    /// Smallest retained and largest discarded singular value, relative to the largest.
    pub smallest_retained: Option<f64>,
    pub largest_discarded: Option<f64>,
    pub warning: Option<String>,
}

/// Self-adjoint real and imaginary parts of each generator, dropping zeros.
/// The commutant of a set equals that of the generated *-algebra only when
/// adjoints are included, so both parts are used.
fn self_adjoint_parts(generators: &[CMat]) -> Vec<CMat> {
    let half = C64::new(0.5, 0.0);
    let half_i = C64::new(0.0, -0.5);
    let mut out = Vec::new();
    for g in generators {
        let scale = 1.0 + frobenius(g);
        let ga = adjoint(g);
        for h in [(g + &ga) * faer::Scale(half), (g - &ga) * faer::Scale(half_i)] {
            if frobenius(&h) > 1e-12 * scale {
                out.push(h);
            }
        }
    }
    out
}

/// Clusters of equal eigenvalues as `(start, len)` in ascending order.
fn eigen_blocks(values: &[f64]) -> Vec<(usize, usize)> {
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-8 * scale;
    let mut blocks = Vec::new();
    let mut start = 0;
    for k in 1..=values.len() {
        if k == values.len() || values[k] - values[k - 1] > tol {
            blocks.push((start, k - start));
            start = k;
        }
    }
    blocks
}

fn nullity(rows: &CMat, unknowns: usize) -> Result<GenerationReport, RmtError> {
    if rows.nrows() == 0 {
        return Ok(GenerationReport {
            commutant_dimension: unknowns,
            unknowns,
            smallest_retained: None,
            largest_discarded: None,
            warning: None,
        });
    }
    let sv = rows.singular_values().map_err(|e| RmtError::Linalg(format!("singular values failed: {e:?}")))?;
    let top = sv.iter().copied().fold(0.0f64, f64::max);
    let rel: Vec<f64> = sv.iter().map(|s| if top > 0.0 { s / top } else { 0.0 }).collect();
    let rank = rel.iter().filter(|r| **r > RANK_TOLERANCE).count();
    let smallest_retained = rel.iter().copied().filter(|r| *r > RANK_TOLERANCE).reduce(f64::min);
    let largest_discarded = rel.iter().copied().filter(|r| *r <= RANK_TOLERANCE).reduce(f64::max);
    let near = rel.iter().filter(|r| **r > WARN_LOW && **r < WARN_HIGH).count();
    let warning = (near > 0).then(|| {
        format!("{near} singular value(s) within [{WARN_LOW:e}, {WARN_HIGH:e}] of the largest; rank is ill-conditioned")
    });
    Ok(GenerationReport {
        commutant_dimension: unknowns - rank,
        unknowns,
        smallest_retained,
        largest_discarded,
        warning,
    })
}

/// Commutant dimension of `generators` (together with their adjoints).
pub fn commutant_dimension(generators: &[CMat]) -> Result<GenerationReport, RmtError> {
    let n = generators.first().ok_or_else(|| RmtError::InvalidArgument("empty generator set".into()))?.nrows();
    if generators.iter().any(|g| g.nrows() != n || g.ncols() != n) {
        return Err(RmtError::InvalidArgument("generators must be square of one size".into()));
    }
    let parts = self_adjoint_parts(generators);
    let Some((head, rest)) = parts.split_first() else {
        return nullity(&CMat::zeros(0, 0), n * n);
    };
    // In the eigenbasis of the first generator the commutant is block diagonal.
    let (values, v) = hermitian_eigen(head)?;
    let blocks = eigen_blocks(&values);
    let mut unknown_of = vec![usize::MAX; n * n];
    let mut unknowns = Vec::new();
    for &(s, m) in &blocks {
        for c in s..s + m {
            for a in s..s + m {
                unknown_of[a + c * n] = unknowns.len();
                unknowns.push((a, c));
            }
        }
    }
    let k = unknowns.len();
    let va = adjoint(&v);
    let mut stacked: Vec<Vec<C64>> = Vec::new();
    for g in rest {
        let h = &va * g * &v;
        // Row (i, j) of [X, H] = sum_c X_ic H_cj - H_ic X_cj, restricted to block-diagonal X.
        let mut block = CMat::zeros(n * n, k);
        for (idx, &(a, c)) in unknowns.iter().enumerate() {
            for j in 0..n {
                block[(a + j * n, idx)] += h[(c, j)];
            }
            for i in 0..n {
                block[(i + c * n, idx)] -= h[(i, a)];
            }
        }
        let scale = frobenius(&h).max(1e-300);
        for r in 0..n * n {
            let row: Vec<C64> = (0..k).map(|idx| block[(r, idx)]).collect();
            if row.iter().any(|x| x.norm() > 1e-14 * scale) {
                stacked.push(row);
            }
        }
    }
    let rows = CMat::from_fn(stacked.len(), k, |i, j| stacked[i][j]);
    nullity(&rows, k)
}

/// Commutant dimension of the named scene matrices.
pub fn generation_check(scene: &MatrixScene, names: &[&str]) -> Result<GenerationReport, RmtError> {
    let gens = names.iter().map(|n| scene.get(n).cloned()).collect::<Result<Vec<_>, _>>()?;
    commutant_dimension(&gens)
}

/// Dense reference: nullity of the full `N^2 x N^2` commutation operator
/// stacked over every generator and its adjoint.
pub fn commutant_dimension_brute_force(generators: &[CMat]) -> Result<usize, RmtError> {
    let n = generators.first().ok_or_else(|| RmtError::InvalidArgument("empty generator set".into()))?.nrows();
    if n > BRUTE_FORCE_MAX_N {
        return Err(RmtError::InvalidArgument(format!("brute force limited to N <= {BRUTE_FORCE_MAX_N}")));
    }
    let mut all = Vec::new();
    for g in generators {
        all.push(g.clone());
        all.push(adjoint(g));
    }
    let d = n * n;
    let mut rows = CMat::zeros(all.len() * d, d);
    for (gi, g) in all.iter().enumerate() {
        // vec(XG - GX) = (G^T kron I - I kron G) vec(X), column-major.
        for a in 0..n {
            for c in 0..n {
                let col = a + c * n;
                for j in 0..n {
                    rows[(gi * d + a + j * n, col)] += g[(c, j)];
                }
                for i in 0..n {
                    rows[(gi * d + i + c * n, col)] -= g[(i, a)];
                }
            }
        }
    }
    Ok(nullity(&rows, d)?.commutant_dimension)
}
