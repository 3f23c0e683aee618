//! The free-product trace and the centered normal form of a word.

use std::collections::HashMap;

use super::algebra::{AlgebraElement, AlgebraSet, FreeWord};
use super::scalar::ExactScalar;
use super::FreeProdError;

type Letters<S> = Vec<AlgebraElement<S>>;

/// Multiplies adjacent letters from the same factor.
fn merge<S: ExactScalar>(letters: &[AlgebraElement<S>]) -> Letters<S> {
    let mut out: Letters<S> = Vec::with_capacity(letters.len());
    for l in letters {
        match out.last_mut() {
            Some(prev) if prev.algebra_id == l.algebra_id => *prev = prev.product(l),
            _ => out.push(l.clone()),
        }
    }
    out
}

/// The letter at `j` split as `centered + t * 1`, for the leftmost `j` with `t != 0`.
fn leftmost_uncentered<S: ExactScalar>(
    algebras: &AlgebraSet,
    word: &[AlgebraElement<S>],
) -> Option<(usize, S, AlgebraElement<S>)> {
    word.iter().enumerate().find_map(|(j, l)| {
        let alg = algebras.get(l.algebra_id).expect("validated word");
        let t = alg.trace_unchecked(l);
        (!t.is_zero()).then(|| (j, t.clone(), l.map(|v| v.minus(&t))))
    })
}

fn replace_letter<S: Clone>(word: &[S], j: usize, letter: S) -> Vec<S> {
    let mut w = word.to_vec();
    w[j] = letter;
    w
}

fn remove_letter<S: Clone>(word: &[S], j: usize) -> Vec<S> {
    let mut w = word.to_vec();
    w.remove(j);
    w
}

struct TraceEngine<'a, S> {
    algebras: &'a AlgebraSet,
    memo: HashMap<Letters<S>, S>,
}

impl<S: ExactScalar> TraceEngine<'_, S> {
    fn trace(&mut self, letters: &[AlgebraElement<S>]) -> S {
        let word = merge(letters);
        if word.iter().any(|l| l.is_zero()) {
            return S::zero();
        }
        match word.len() {
            0 => return S::one(),
            1 => {
                let alg = self.algebras.get(word[0].algebra_id).expect("validated word");
                return alg.trace_unchecked(&word[0]);
            }
            _ => {}
        }
        if let Some(v) = self.memo.get(&word) {
            return v.clone();
        }
        let value = match leftmost_uncentered(self.algebras, &word) {
            // Alternating and fully centered.
            None => S::zero(),
            Some((j, t, centered)) => {
                let kept = self.trace(&replace_letter(&word, j, centered));
                let dropped = self.trace(&remove_letter(&word, j));
                kept.plus(&t.times(&dropped))
            }
        };
        self.memo.insert(word, value.clone());
        value
    }
}

/// Exact trace of a word in the free product of the given factors.
///
/// Each non-centered letter is split as `a = (a - tau(a)) + tau(a)`, leftmost
/// first; dropping a letter lets its neighbours merge, so lengths strictly
/// decrease, and alternating centered words contribute 0.
pub fn trace_word<S: ExactScalar>(w: &FreeWord<S>, algebras: &AlgebraSet) -> Result<S, FreeProdError> {
    w.validate(algebras)?;
    let mut engine = TraceEngine { algebras, memo: HashMap::new() };
    Ok(engine.trace(&w.letters))
}

/// A finite combination `scalar * 1 + sum coeff_k * word_k` in which every
/// word alternates and every letter is centered.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm<S = super::GaussianRational> {
    pub scalar: S,
    pub terms: Vec<(S, FreeWord<S>)>,
}

impl<S: ExactScalar> NormalForm<S> {
    /// The trace of the represented element.
    pub fn trace(&self) -> &S {
        &self.scalar
    }
}

struct Combination<S> {
    order: Vec<Letters<S>>,
    coeffs: HashMap<Letters<S>, S>,
}

impl<S: ExactScalar> Combination<S> {
    fn add(&mut self, word: Letters<S>, c: S) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&word) {
            Some(v) => *v = v.plus(&c),
            None => {
                self.order.push(word.clone());
                self.coeffs.insert(word, c);
            }
        }
    }

    fn add_scaled(&mut self, other: &Combination<S>, s: &S) {
        for w in &other.order {
            self.add(w.clone(), other.coeffs[w].times(s));
        }
    }

    fn clone_shallow(&self) -> Self {
        Self { order: self.order.clone(), coeffs: self.coeffs.clone() }
    }
}

struct NormalFormEngine<'a, S> {
    algebras: &'a AlgebraSet,
    memo: HashMap<Letters<S>, Combination<S>>,
}

impl<S: ExactScalar> NormalFormEngine<'_, S> {
    fn expand(&mut self, letters: &[AlgebraElement<S>]) -> Combination<S> {
        let word = merge(letters);
        let mut out = Combination { order: Vec::new(), coeffs: HashMap::new() };
        if word.iter().any(|l| l.is_zero()) {
            return out;
        }
        if let Some(c) = self.memo.get(&word) {
            return c.clone_shallow();
        }
        match leftmost_uncentered(self.algebras, &word) {
            None => out.add(word.clone(), S::one()),
            Some((j, t, centered)) => {
                let kept = self.expand(&replace_letter(&word, j, centered));
                out.add_scaled(&kept, &S::one());
                let dropped = self.expand(&remove_letter(&word, j));
                out.add_scaled(&dropped, &t);
            }
        }
        self.memo.insert(word, out.clone_shallow());
        out
    }
}

/// Rewrites a word as a scalar plus alternating words of centered letters.
///
/// Adjacent letters from one factor are merged, which also absorbs products
/// such as a centered corner element times a generator into a single
/// centered letter.
pub fn normal_form<S: ExactScalar>(
    w: &FreeWord<S>,
    algebras: &AlgebraSet,
) -> Result<NormalForm<S>, FreeProdError> {
    w.validate(algebras)?;
    let mut engine = NormalFormEngine { algebras, memo: HashMap::new() };
    let combo = engine.expand(&w.letters);
    let mut scalar = S::zero();
    let mut terms = Vec::new();
    for word in &combo.order {
        let c = &combo.coeffs[word];
        if c.is_zero() {
            continue;
        }
        if word.is_empty() {
            scalar = c.clone();
        } else {
            terms.push((c.clone(), FreeWord::new(word.clone())));
        }
    }
    Ok(NormalForm { scalar, terms })
}
