//! Exact moments of the sum of two free projections.

use num_traits::One;

use super::algebra::{AlgebraSet, FiniteAbelianAlgebra, FreeWord};
use super::scalar::{ExactScalar, GaussianRational};
use super::trace::trace_word;
use super::FreeProdError;
use crate::Rational;

/// Maximum power accepted by [`projection_sum_moments`]; the expansion has `2^k` words.
pub const MAX_SUM_POWER: u32 = 16;

/// `tau((p + q)^k)` for `k = 1..=max_k`, with `p`, `q` free projections of
/// traces `alpha` and `beta`, computed by expanding into all words in `p`, `q`.
pub fn projection_sum_moments(alpha: &Rational, beta: &Rational, max_k: u32) -> Result<Vec<Rational>, FreeProdError> {
    if max_k > MAX_SUM_POWER {
        return Err(FreeProdError::InvalidWord(format!("power {max_k} exceeds {MAX_SUM_POWER}")));
    }
    let factor = |id: usize, t: &Rational| FiniteAbelianAlgebra::new(id, vec![t.clone(), Rational::one() - t]);
    let a1 = factor(1, alpha)?;
    let a2 = factor(2, beta)?;
    let p = a1.projection::<GaussianRational>(&[0])?;
    let q = a2.projection::<GaussianRational>(&[0])?;
    let set = AlgebraSet::new(vec![a1, a2])?;
    let mut out = Vec::with_capacity(max_k as usize);
    for k in 1..=max_k {
        let mut total = GaussianRational::zero();
        for mask in 0u32..(1 << k) {
            let letters = (0..k).map(|i| if mask & (1 << i) != 0 { p.clone() } else { q.clone() }).collect();
            total = total.plus(&trace_word(&FreeWord::new(letters), &set)?);
        }
        out.push(total.re);
    }
    Ok(out)
}
