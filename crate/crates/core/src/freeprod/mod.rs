//! Exact traces in free products of finite abelian tracial algebras.

mod algebra;
mod json;
mod moments;
mod sbasis;
mod scalar;
mod trace;

pub use algebra::{center, conditional_expectation, AlgebraElement, AlgebraSet, FiniteAbelianAlgebra, FreeWord};
pub use json::{parse_rational, parse_value, parse_word_literal};
pub use moments::{projection_sum_moments, MAX_SUM_POWER};
pub use sbasis::{
    centered_generator_in, make_centered_generator, sbasis_multiply, standard_factor, SBasis, SBasisWord,
    SCombination,
};
pub use scalar::{ExactScalar, GaussianRational, QuadraticSurd};
pub use trace::{normal_form, trace_word, NormalForm};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FreeProdError {
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("unknown algebra id {0}")]
    UnknownAlgebra(usize),
    #[error("element of algebra {got} used where algebra {expected} was expected")]
    WrongAlgebra { expected: usize, got: usize },
    #[error("algebra {algebra} has {expected} atoms but the element has {got} values")]
    LengthMismatch { algebra: usize, expected: usize, got: usize },
    #[error("blocks are not a partition of the atoms: {0}")]
    NotAPartition(String),
    #[error("alpha = {0} is outside (0, 1/2]")]
    InvalidAlpha(String),
    #[error("not representable: {0}")]
    Unrepresentable(String),
    #[error("invalid word: {0}")]
    InvalidWord(String),
    #[error("malformed JSON literal: {0}")]
    Json(String),
}
