//! Finite abelian tracial algebras, their elements, and words in their free product.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::scalar::ExactScalar;
use super::{FreeProdError, GaussianRational};
use crate::Rational;

/// Functions on a finite probability space: atoms with exact weights summing to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAbelianAlgebra {
    id: usize,
    weights: Vec<Rational>,
}

impl FiniteAbelianAlgebra {
    pub fn new(id: usize, weights: Vec<Rational>) -> Result<Self, FreeProdError> {
        if weights.is_empty() {
            return Err(FreeProdError::InvalidAlgebra(format!("algebra {id} has no atoms")));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_positive() || **w > Rational::one()) {
            return Err(FreeProdError::InvalidAlgebra(format!(
                "algebra {id}: weight {w} is outside (0, 1]"
            )));
        }
        let total = weights.iter().fold(Rational::zero(), |acc, w| acc + w);
        if !total.is_one() {
            return Err(FreeProdError::InvalidAlgebra(format!(
                "algebra {id}: weights sum to {total}, not 1"
            )));
        }
        Ok(Self { id, weights })
    }

    /// Uniform weights `1/k` on `k` atoms.
    pub fn uniform(id: usize, atoms: usize) -> Result<Self, FreeProdError> {
        let w = Rational::new(1.into(), (atoms.max(1) as i64).into());
        Self::new(id, vec![w; atoms])
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn num_atoms(&self) -> usize {
        self.weights.len()
    }

    pub fn element<S: ExactScalar>(&self, values: Vec<S>) -> Result<AlgebraElement<S>, FreeProdError> {
        let e = AlgebraElement { algebra_id: self.id, values };
        self.check(&e)?;
        Ok(e)
    }

    pub fn unit<S: ExactScalar>(&self) -> AlgebraElement<S> {
        self.constant(S::one())
    }

    pub fn constant<S: ExactScalar>(&self, value: S) -> AlgebraElement<S> {
        AlgebraElement { algebra_id: self.id, values: vec![value; self.num_atoms()] }
    }

    /// Indicator of a set of atoms.
    pub fn projection<S: ExactScalar>(&self, atoms: &[usize]) -> Result<AlgebraElement<S>, FreeProdError> {
        if let Some(a) = atoms.iter().find(|a| **a >= self.num_atoms()) {
            return Err(FreeProdError::InvalidAlgebra(format!(
                "atom {a} does not exist in algebra {}",
                self.id
            )));
        }
        let values = (0..self.num_atoms())
            .map(|k| if atoms.contains(&k) { S::one() } else { S::zero() })
            .collect();
        Ok(AlgebraElement { algebra_id: self.id, values })
    }

    pub(crate) fn check<S>(&self, e: &AlgebraElement<S>) -> Result<(), FreeProdError> {
        if e.algebra_id != self.id {
            return Err(FreeProdError::WrongAlgebra { expected: self.id, got: e.algebra_id });
        }
        if e.values.len() != self.num_atoms() {
            return Err(FreeProdError::LengthMismatch {
                algebra: self.id,
                expected: self.num_atoms(),
                got: e.values.len(),
            });
        }
        Ok(())
    }

    /// `sum_k weight_k value_k`.
    pub fn trace<S: ExactScalar>(&self, e: &AlgebraElement<S>) -> Result<S, FreeProdError> {
        self.check(e)?;
        Ok(self.trace_unchecked(e))
    }

    pub(crate) fn trace_unchecked<S: ExactScalar>(&self, e: &AlgebraElement<S>) -> S {
        self.weights
            .iter()
            .zip(&e.values)
            .fold(S::zero(), |acc, (w, v)| acc.plus(&v.scaled(w)))
    }
}

/// `a - tau(a) 1`.
pub fn center<S: ExactScalar>(
    a: &AlgebraElement<S>,
    algebra: &FiniteAbelianAlgebra,
) -> Result<AlgebraElement<S>, FreeProdError> {
    let t = algebra.trace(a)?;
    Ok(a.map(|v| v.minus(&t)))
}

/// Trace-preserving conditional expectation onto the subalgebra of functions
/// constant on each block.
pub fn conditional_expectation<S: ExactScalar>(
    a: &AlgebraElement<S>,
    algebra: &FiniteAbelianAlgebra,
    blocks: &[Vec<usize>],
) -> Result<AlgebraElement<S>, FreeProdError> {
    algebra.check(a)?;
    let n = algebra.num_atoms();
    let mut seen = vec![false; n];
    for block in blocks {
        if block.is_empty() {
            return Err(FreeProdError::NotAPartition("empty block".into()));
        }
        for &k in block {
            if k >= n || std::mem::replace(&mut seen[k], true) {
                return Err(FreeProdError::NotAPartition(format!("atom {k} is missing or repeated")));
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(FreeProdError::NotAPartition("blocks do not cover every atom".into()));
    }
    let mut values = a.values.clone();
    for block in blocks {
        let mass = block.iter().fold(Rational::zero(), |acc, &k| acc + &algebra.weights[k]);
        let integral = block
            .iter()
            .fold(S::zero(), |acc, &k| acc.plus(&a.values[k].scaled(&algebra.weights[k])));
        let mean = integral.scaled(&mass.recip());
        for &k in block {
            values[k] = mean.clone();
        }
    }
    Ok(AlgebraElement { algebra_id: a.algebra_id, values })
}

/// An element of one factor: a value per atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraElement<S = GaussianRational> {
    pub algebra_id: usize,
    pub values: Vec<S>,
}

impl<S: ExactScalar> AlgebraElement<S> {
    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        Self { algebra_id: self.algebra_id, values: self.values.iter().map(f).collect() }
    }

    /// Pointwise product; both factors must live in the same algebra.
    pub fn product(&self, other: &Self) -> Self {
        debug_assert_eq!(self.algebra_id, other.algebra_id);
        Self {
            algebra_id: self.algebra_id,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a.times(b)).collect(),
        }
    }

    pub fn sum(&self, other: &Self) -> Self {
        debug_assert_eq!(self.algebra_id, other.algebra_id);
        Self {
            algebra_id: self.algebra_id,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a.plus(b)).collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|v| v.times(s))
    }

    pub fn adjoint(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    pub fn is_projection(&self) -> bool {
        self.values.iter().all(|v| v.is_zero() || *v == S::one())
    }
}

/// Factors indexed by id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AlgebraSet {
    algebras: BTreeMap<usize, FiniteAbelianAlgebra>,
}

impl AlgebraSet {
    pub fn new(algebras: Vec<FiniteAbelianAlgebra>) -> Result<Self, FreeProdError> {
        let mut map = BTreeMap::new();
        for a in algebras {
            let id = a.id();
            if map.insert(id, a).is_some() {
                return Err(FreeProdError::InvalidAlgebra(format!("duplicate algebra id {id}")));
            }
        }
        Ok(Self { algebras: map })
    }

    pub fn get(&self, id: usize) -> Result<&FiniteAbelianAlgebra, FreeProdError> {
        self.algebras.get(&id).ok_or(FreeProdError::UnknownAlgebra(id))
    }

    pub fn iter(&self) -> impl Iterator<Item = &FiniteAbelianAlgebra> {
        self.algebras.values()
    }

    pub fn len(&self) -> usize {
        self.algebras.len()
    }

    pub fn is_empty(&self) -> bool {
        self.algebras.is_empty()
    }
}

/// An ordered product of letters; the empty word is the unit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FreeWord<S = GaussianRational> {
    pub letters: Vec<AlgebraElement<S>>,
}

impl<S: ExactScalar> FreeWord<S> {
    pub fn new(letters: Vec<AlgebraElement<S>>) -> Self {
        Self { letters }
    }

    pub fn unit() -> Self {
        Self { letters: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        Self { letters }
    }

    /// Reversed word of adjoint letters.
    pub fn adjoint(&self) -> Self {
        Self { letters: self.letters.iter().rev().map(|l| l.adjoint()).collect() }
    }

    /// Moves the first `k` letters to the end.
    pub fn rotate(&self, k: usize) -> Self {
        let mut letters = self.letters.clone();
        if !letters.is_empty() {
            let k = k % letters.len();
            letters.rotate_left(k);
        }
        Self { letters }
    }

    /// Whether consecutive letters come from different factors.
    pub fn is_alternating(&self) -> bool {
        self.letters.windows(2).all(|w| w[0].algebra_id != w[1].algebra_id)
    }

    pub fn validate(&self, algebras: &AlgebraSet) -> Result<(), FreeProdError> {
        for l in &self.letters {
            algebras.get(l.algebra_id)?.check(l)?;
        }
        Ok(())
    }
}
