//! Haar unitaries, projection pairs, the sign unitary and intertwiners.

use num_traits::ToPrimitive;
use rand::seq::index::sample;
use rand::Rng;

use super::linalg::{
    adjoint, conjugate_real_diagonal, frobenius_distance, ginibre, hermitian_eigen, hermitian_part, identity,
    select_columns, CMat,
};
use super::RmtError;
use crate::{Rational, C64};

pub const SINGULARITY_FLOOR: f64 = 1e-10;
pub const PARTITION_TOLERANCE: f64 = 1e-8;
/// Resamples allowed when a sign unitary input is nearly singular.
pub const MAX_SIGN_RETRIES: usize = 5;

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn sample_haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    assert!(n >= 1, "dimension must be positive");
    let z = ginibre(n, n, rng);
    let qr = z.qr();
    let mut q = qr.compute_Q();
    let r = qr.R();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for x in q.col_as_slice_mut(j) {
            *x *= phase;
        }
    }
    q
}

/// `alpha * n` as an integer rank, if it is one.
pub fn integral_rank(alpha: &Rational, n: usize) -> Result<usize, RmtError> {
    let r = alpha * Rational::from_integer(n.into());
    if !r.is_integer() || r < Rational::from_integer(0.into()) {
        return Err(RmtError::NonIntegralRank { alpha: alpha.to_string(), n });
    }
    r.to_integer().to_usize().ok_or_else(|| RmtError::NonIntegralRank { alpha: alpha.to_string(), n })
}

/// Diagonal projection onto the first `r` coordinates.
pub fn diagonal_projection(n: usize, r: usize) -> CMat {
    CMat::from_fn(n, n, |i, j| if i == j && i < r { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

/// Orthogonal projection onto the span of the orthonormal columns of `e`.
pub fn range_projection(e: &CMat) -> CMat {
    hermitian_part(&(e * e.adjoint()))
}

/// `P1` diagonal of rank `alpha n`; `P2 = U P' U*` with `U` Haar and `P'` a
/// diagonal projection on a random set of `alpha n` coordinates.
pub fn sample_projection_pair<R: Rng + ?Sized>(
    alpha: &Rational,
    n: usize,
    rng: &mut R,
) -> Result<(CMat, CMat), RmtError> {
    let r = integral_rank(alpha, n)?;
    let p1 = diagonal_projection(n, r);
    let u = sample_haar_unitary(n, rng);
    let mut cols: Vec<usize> = sample(rng, n, r).into_vec();
    cols.sort_unstable();
    let p2 = range_projection(&select_columns(&u, &cols));
    Ok((p1, p2))
}

/// `sign(X)` of a self-adjoint matrix by eigendecomposition.
pub fn polar_sign_unitary(x: &CMat) -> Result<CMat, RmtError> {
    let scale = 1.0 + frobenius_distance(x, &CMat::zeros(x.nrows(), x.ncols()));
    let asym = frobenius_distance(x, &adjoint(x));
    if asym > 1e-8 * scale {
        return Err(RmtError::InvalidArgument(format!("input is not self-adjoint (defect {asym})")));
    }
    let (vals, vecs) = hermitian_eigen(x)?;
    let smallest = vals.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    if smallest < SINGULARITY_FLOOR {
        return Err(RmtError::NearSingular { min_abs_eigenvalue: smallest });
    }
    let signs: Vec<f64> = vals.iter().map(|v| v.signum()).collect();
    Ok(conjugate_real_diagonal(&vecs, &signs))
}

fn partition_defect(ps: &[CMat], us: &[CMat]) -> f64 {
    let n = ps[0].nrows();
    let mut total = CMat::zeros(n, n);
    for (p, u) in ps.iter().zip(us) {
        total += u * p * u.adjoint();
    }
    frobenius_distance(&total, &identity(n))
}

/// `w = sum_i v_i p_i u_i*`, which conjugates `sum u_i A_i p_i u_i*` onto
/// `sum v_i A_i p_i v_i*`.
pub fn build_intertwiner(ps: &[CMat], us: &[CMat], vs: &[CMat]) -> Result<CMat, RmtError> {
    if ps.is_empty() || ps.len() != us.len() || ps.len() != vs.len() {
        return Err(RmtError::InvalidArgument("need equally many projections and unitaries".into()));
    }
    for (name, fam) in [("u", us), ("v", vs)] {
        let d = partition_defect(ps, fam);
        if !(d <= PARTITION_TOLERANCE) {
            return Err(RmtError::PartitionOfUnity(format!(
                "sum {name}_i p_i {name}_i* differs from I by {d}"
            )));
        }
    }
    let n = ps[0].nrows();
    let mut w = CMat::zeros(n, n);
    for ((p, u), v) in ps.iter().zip(us).zip(vs) {
        w += v * p * u.adjoint();
    }
    Ok(w)
}

/// Eigenvalues of a Hermitian matrix within `tol` of zero.
pub fn kernel_dimension(h: &CMat, tol: f64) -> Result<usize, RmtError> {
    let (vals, _) = hermitian_eigen(h)?;
    Ok(vals.iter().filter(|v| v.abs() <= tol).count())
}
