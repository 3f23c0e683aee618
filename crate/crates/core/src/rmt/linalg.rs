//! Dense complex matrix helpers on top of `faer`.

use faer::{Mat, Side};
use rand::Rng;
use rand_distr::StandardNormal;

use super::RmtError;
use crate::numeric::CompensatedSum;
use crate::C64;

pub type CMat = Mat<C64>;

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(n: usize, m: usize) -> CMat {
    CMat::zeros(n, m)
}

/// Complex Gaussian matrix with independent entries, `E|z|^2 = 1`.
pub fn ginibre<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = CMat::zeros(n, m);
    for j in 0..m {
        for i in 0..n {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            out[(i, j)] = C64::new(s * re, s * im);
        }
    }
    out
}

pub fn adjoint(a: &CMat) -> CMat {
    a.adjoint().to_owned()
}

pub fn matmul(a: &CMat, b: &CMat) -> CMat {
    a * b
}

pub fn add(a: &CMat, b: &CMat) -> CMat {
    a + b
}

pub fn sub(a: &CMat, b: &CMat) -> CMat {
    a - b
}

pub fn scale(a: &CMat, s: C64) -> CMat {
    a * faer::Scale(s)
}

/// `(a + a*) / 2`
pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()) * faer::Scale(C64::new(0.5, 0.0))
}

/// Frobenius norm.
pub fn frobenius(a: &CMat) -> f64 {
    a.as_ref().norm_l2()
}

pub fn frobenius_distance(a: &CMat, b: &CMat) -> f64 {
    frobenius(&(a - b))
}

/// Normalized trace `Tr(a) / N`.
pub fn ntrace(a: &CMat) -> C64 {
    let n = a.nrows();
    let (mut re, mut im) = (CompensatedSum::new(), CompensatedSum::new());
    for i in 0..n {
        re.add(a[(i, i)].re);
        im.add(a[(i, i)].im);
    }
    C64::new(re.value(), im.value()) / n as f64
}

/// `Tr(a b) / N` without forming the product.
pub fn trace_product(a: &CMat, b: &CMat) -> C64 {
    let n = a.nrows();
    let bt = b.transpose();
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..a.ncols() {
        let col = a.col(j);
        let row = bt.col(j);
        let mut s = C64::new(0.0, 0.0);
        for i in 0..n {
            s += col[i] * row[i];
        }
        acc += s;
    }
    acc / n as f64
}

/// Eigenvalues (ascending) and eigenvectors of the Hermitian part of `a`.
pub fn hermitian_eigen(a: &CMat) -> Result<(Vec<f64>, CMat), RmtError> {
    let h = hermitian_part(a);
    let evd = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| RmtError::Linalg(format!("eigendecomposition failed: {e:?}")))?;
    let n = h.nrows();
    let values = (0..n).map(|k| evd.S()[k].re).collect();
    Ok((values, evd.U().to_owned()))
}

/// `V diag(d) V*`.
pub fn conjugate_diagonal(v: &CMat, d: &[C64]) -> CMat {
    let mut vd = v.clone();
    for (j, dj) in d.iter().enumerate() {
        for x in vd.col_as_slice_mut(j) {
            *x *= dj;
        }
    }
    &vd * v.adjoint()
}

/// `V diag(d) V*` with real `d`, made exactly Hermitian.
pub fn conjugate_real_diagonal(v: &CMat, d: &[f64]) -> CMat {
    let dc: Vec<C64> = d.iter().map(|x| C64::new(*x, 0.0)).collect();
    hermitian_part(&conjugate_diagonal(v, &dc))
}

/// `f(h)` for Hermitian `h` by spectral calculus.
pub fn hermitian_function(h: &CMat, f: impl Fn(f64) -> f64) -> Result<CMat, RmtError> {
    let (vals, vecs) = hermitian_eigen(h)?;
    let d: Vec<f64> = vals.iter().map(|&x| f(x)).collect();
    Ok(conjugate_real_diagonal(&vecs, &d))
}

/// `||u u* - I||_F`
pub fn unitarity_defect(u: &CMat) -> f64 {
    frobenius_distance(&(u * u.adjoint()), &identity(u.nrows()))
}

/// `sum_k c_k m_k`
pub fn linear_combination(mats: &[CMat], coeffs: &[f64]) -> CMat {
    assert_eq!(mats.len(), coeffs.len());
    let (n, m) = (mats[0].nrows(), mats[0].ncols());
    let mut out = CMat::zeros(n, m);
    for (a, &c) in mats.iter().zip(coeffs) {
        for j in 0..m {
            let dst = out.col_as_slice_mut(j);
            let src = a.col_as_slice(j);
            for (d, s) in dst.iter_mut().zip(src) {
                *d += s * c;
            }
        }
    }
    out
}

/// Columns `cols` of `a`, in order.
pub fn select_columns(a: &CMat, cols: &[usize]) -> CMat {
    CMat::from_fn(a.nrows(), cols.len(), |i, j| a[(i, cols[j])])
}

/// Concatenates column blocks.
pub fn hstack(blocks: &[CMat]) -> CMat {
    let n = blocks[0].nrows();
    let m: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(n, m);
    let mut offset = 0;
    for b in blocks {
        for j in 0..b.ncols() {
            out.col_as_slice_mut(offset + j).copy_from_slice(b.col_as_slice(j));
        }
        offset += b.ncols();
    }
    out
}

/// `a - tau(a) I`
pub fn centered(a: &CMat) -> CMat {
    let t = ntrace(a);
    let mut out = a.clone();
    for i in 0..a.nrows() {
        out[(i, i)] -= t;
    }
    out
}

/// `tau(a* a)`
pub fn norm2_normalized(a: &CMat) -> f64 {
    let f = frobenius(a);
    f * f / a.nrows() as f64
}
