//! Alternating words in the centered generators `v_1, v_2` and their products.
//!
//! With `p_11` a projection of trace `alpha` in the first factor and `p_22`
//! one of the same trace in the second, `v_i = (p_ii - alpha) / sqrt(alpha - alpha^2)`
//! satisfies `tau(v_i) = 0`, `tau(v_i^2) = 1` and `v_i^2 = 1 + c v_i` with
//! `c = (1 - 2 alpha) / sqrt(alpha - alpha^2)`.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::algebra::{AlgebraElement, AlgebraSet, FiniteAbelianAlgebra, FreeWord};
use super::scalar::{ExactScalar, QuadraticSurd};
use super::FreeProdError;
use crate::Rational;

fn validate_alpha(alpha: &Rational) -> Result<(), FreeProdError> {
    let half = Rational::new(1.into(), 2.into());
    if !alpha.is_positive() || *alpha > half {
        return Err(FreeProdError::InvalidAlpha(alpha.to_string()));
    }
    Ok(())
}

/// `(p - alpha) / sqrt(alpha - alpha^2)` for the projection `p` onto `atoms`.
fn generator_on(
    algebra: &FiniteAbelianAlgebra,
    atoms: &[usize],
    alpha: &Rational,
) -> AlgebraElement<QuadraticSurd> {
    let d = alpha - alpha * alpha;
    // 1 / sqrt(d) = sqrt(d) / d
    let inv_root = QuadraticSurd::sqrt(&d).scaled(&d.recip());
    let on = inv_root.scaled(&(Rational::one() - alpha));
    let off = inv_root.scaled(&(-alpha.clone()));
    let values = (0..algebra.num_atoms())
        .map(|k| if atoms.contains(&k) { on.clone() } else { off.clone() })
        .collect();
    AlgebraElement { algebra_id: algebra.id(), values }
}

/// Centered generator built from a projection of trace `alpha` inside `algebra`.
///
/// The projection is the first set of atoms (in binary counting order over
/// at most 20 atoms) whose weights sum exactly to `alpha`.
pub fn centered_generator_in(
    algebra: &FiniteAbelianAlgebra,
    alpha: &Rational,
) -> Result<AlgebraElement<QuadraticSurd>, FreeProdError> {
    validate_alpha(alpha)?;
    let n = algebra.num_atoms();
    if n > 20 {
        return Err(FreeProdError::Unrepresentable(format!(
            "subset search over {n} atoms is not supported"
        )));
    }
    for mask in 1u32..(1 << n) {
        let atoms: Vec<usize> = (0..n).filter(|k| mask & (1 << k) != 0).collect();
        let mass = atoms.iter().fold(Rational::zero(), |acc, &k| acc + &algebra.weights()[k]);
        if mass == *alpha {
            return Ok(generator_on(algebra, &atoms, alpha));
        }
    }
    Err(FreeProdError::Unrepresentable(format!(
        "no set of atoms of algebra {} has weight {alpha}",
        algebra.id()
    )))
}

/// Two-atom factor `i` adapted to `alpha`: factor 1 has weights
/// `(alpha, 1 - alpha)` with `p_11` the first atom, factor 2 has weights
/// `(1 - alpha, alpha)` with `p_22` the second atom.
pub fn standard_factor(i: usize, alpha: &Rational) -> Result<FiniteAbelianAlgebra, FreeProdError> {
    validate_alpha(alpha)?;
    let rest = Rational::one() - alpha;
    match i {
        1 => FiniteAbelianAlgebra::new(1, vec![alpha.clone(), rest]),
        2 => FiniteAbelianAlgebra::new(2, vec![rest, alpha.clone()]),
        _ => Err(FreeProdError::InvalidAlgebra(format!("generator index {i} is not 1 or 2"))),
    }
}

/// The centered generator `v_i` on [`standard_factor`]`(i, alpha)`.
pub fn make_centered_generator(
    i: usize,
    alpha: &Rational,
) -> Result<AlgebraElement<QuadraticSurd>, FreeProdError> {
    let algebra = standard_factor(i, alpha)?;
    let atom = if i == 1 { 0 } else { 1 };
    Ok(generator_on(&algebra, &[atom], alpha))
}

/// An alternating word in `v_1, v_2`; the empty word is the unit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SBasisWord {
    indices: Vec<u8>,
}

impl SBasisWord {
    pub fn new(indices: Vec<u8>) -> Result<Self, FreeProdError> {
        if indices.iter().any(|i| *i != 1 && *i != 2) {
            return Err(FreeProdError::InvalidWord(format!("{indices:?} uses an index other than 1, 2")));
        }
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(FreeProdError::InvalidWord(format!("{indices:?} does not alternate")));
        }
        Ok(Self { indices })
    }

    pub fn unit() -> Self {
        Self { indices: Vec::new() }
    }

    pub fn indices(&self) -> &[u8] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// All S-words of length at most `max_len`, shortest first.
    pub fn all_up_to(max_len: usize) -> Vec<Self> {
        let mut out = vec![Self::unit()];
        for len in 1..=max_len {
            for first in [1u8, 2] {
                let indices = (0..len).map(|k| if k % 2 == 0 { first } else { 3 - first }).collect();
                out.push(Self { indices });
            }
        }
        out
    }
}

impl fmt::Display for SBasisWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.indices.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.indices.iter().map(|i| format!("v{i}")).collect();
        write!(f, "{}", parts.join(""))
    }
}

/// A finite combination of S-words with coefficients in `Q(sqrt(alpha - alpha^2))`,
/// kept sorted by word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SCombination {
    terms: Vec<(SBasisWord, QuadraticSurd)>,
}

impl SCombination {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (SBasisWord, QuadraticSurd)>) -> Self {
        let mut acc: HashMap<SBasisWord, QuadraticSurd> = HashMap::new();
        for (w, c) in terms {
            let entry = acc.entry(w).or_insert_with(QuadraticSurd::zero);
            *entry = entry.plus(&c);
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
        Self { terms }
    }

    pub fn word(w: SBasisWord) -> Self {
        Self::from_terms([(w, QuadraticSurd::one())])
    }

    pub fn terms(&self) -> &[(SBasisWord, QuadraticSurd)] {
        &self.terms
    }

    pub fn coefficient(&self, w: &SBasisWord) -> QuadraticSurd {
        self.terms
            .iter()
            .find(|(t, _)| t == w)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(QuadraticSurd::zero)
    }

    /// The trace: S-words other than the unit are centered alternating words.
    pub fn trace(&self) -> QuadraticSurd {
        self.coefficient(&SBasisWord::unit())
    }
}

impl fmt::Display for SCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(w, c)| format!("({c})*{w}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Multiplication table of the S-basis for a fixed `alpha`.
#[derive(Clone, Debug)]
pub struct SBasis {
    alpha: Rational,
    c: QuadraticSurd,
}

impl SBasis {
    pub fn new(alpha: &Rational) -> Result<Self, FreeProdError> {
        validate_alpha(alpha)?;
        let d = alpha - alpha * alpha;
        let c = QuadraticSurd::sqrt(&d).scaled(&((Rational::one() - alpha * Rational::from_integer(2.into())) / &d));
        Ok(Self { alpha: alpha.clone(), c })
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    /// `c = (1 - 2 alpha) / sqrt(alpha - alpha^2)`.
    pub fn c(&self) -> &QuadraticSurd {
        &self.c
    }

    /// Product of two S-words, reduced at the junction with `v_j^2 = 1 + c v_j`.
    pub fn multiply(&self, w1: &SBasisWord, w2: &SBasisWord) -> SCombination {
        let mut out = Vec::new();
        self.multiply_into(&w1.indices, &w2.indices, &QuadraticSurd::one(), &mut out);
        SCombination::from_terms(out)
    }

    fn multiply_into(&self, x: &[u8], y: &[u8], coeff: &QuadraticSurd, out: &mut Vec<(SBasisWord, QuadraticSurd)>) {
        match (x.last(), y.first()) {
            (Some(a), Some(b)) if a == b => {
                // x' v_j v_j y' = x' y' + c x' v_j y'
                let (xs, ys) = (&x[..x.len() - 1], &y[1..]);
                self.multiply_into(xs, ys, coeff, out);
                let mut joined = x.to_vec();
                joined.extend_from_slice(ys);
                out.push((SBasisWord { indices: joined }, coeff.times(&self.c)));
            }
            _ => {
                let mut joined = x.to_vec();
                joined.extend_from_slice(y);
                out.push((SBasisWord { indices: joined }, coeff.clone()));
            }
        }
    }

    /// Bilinear extension of [`SBasis::multiply`].
    pub fn multiply_combinations(&self, a: &SCombination, b: &SCombination) -> SCombination {
        let mut out = Vec::new();
        for (w1, c1) in &a.terms {
            for (w2, c2) in &b.terms {
                for (w, c) in self.multiply(w1, w2).terms {
                    out.push((w, c.times(&c1.times(c2))));
                }
            }
        }
        SCombination::from_terms(out)
    }

    /// The standard two-factor algebras on which `v_1, v_2` live.
    pub fn algebras(&self) -> AlgebraSet {
        AlgebraSet::new(vec![
            standard_factor(1, &self.alpha).expect("alpha validated"),
            standard_factor(2, &self.alpha).expect("alpha validated"),
        ])
        .expect("distinct ids")
    }

    /// The S-word as a word of generator letters.
    pub fn realize(&self, w: &SBasisWord) -> FreeWord<QuadraticSurd> {
        let v1 = make_centered_generator(1, &self.alpha).expect("alpha validated");
        let v2 = make_centered_generator(2, &self.alpha).expect("alpha validated");
        FreeWord::new(
            w.indices
                .iter()
                .map(|i| if *i == 1 { v1.clone() } else { v2.clone() })
                .collect(),
        )
    }
}

/// Free-function form of [`SBasis::multiply`].
pub fn sbasis_multiply(alpha: &Rational, w1: &SBasisWord, w2: &SBasisWord) -> Result<SCombination, FreeProdError> {
    Ok(SBasis::new(alpha)?.multiply(w1, w2))
}
