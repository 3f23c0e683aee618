//! Finite-dimensional random-matrix models: Haar samples, reassembled
//! algebras, statistical freeness tests and commutant dimensions.

pub mod commutant;
pub mod freeness;
pub mod haar;
pub mod linalg;
pub mod reassembly;
pub mod rng;
pub mod sampler;
pub mod scene;
pub mod suites;

pub use commutant::{commutant_dimension, commutant_dimension_brute_force, generation_check, GenerationReport};
pub use freeness::{
    alternating_patterns, freeness_test, FreenessReport, PatternRow, SlotRecipe, Verdict, VerdictRule, WordPattern,
};
pub use haar::{
    build_intertwiner, integral_rank, kernel_dimension, polar_sign_unitary, sample_haar_unitary,
    sample_projection_pair,
};
pub use linalg::CMat;
pub use reassembly::{build_reassembly, Reassembly, ReassemblySpec, UnitaryMode};
pub use rng::{stream, StreamRng};
pub use sampler::{ElementSampler, SpanSampler};
pub use scene::{MatrixScene, MatrixTag};
pub use suites::{
    bias_scaling, factors_alias_control, factors_check, projection_sum_moments, radial_check, radial_control,
    reassembly_check, semicircular_perp_check, weak_fc_check, weak_fc_control, SuiteOptions, WeakFcKind,
};

#[derive(Debug, thiserror::Error)]
pub enum RmtError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("alpha = {alpha} times N = {n} is not an integer")]
    NonIntegralRank { alpha: String, n: usize },
    #[error("matrix is nearly singular (smallest |eigenvalue| {min_abs_eigenvalue:e})")]
    NearSingular { min_abs_eigenvalue: f64 },
    #[error("partition of unity violated: {0}")]
    PartitionOfUnity(String),
    #[error("{name} violates its invariant (defect {defect:e})")]
    InvariantViolation { name: String, defect: f64 },
    #[error("linear algebra failure: {0}")]
    Linalg(String),
    #[error("vectors are not perpendicular (inner product {inner:e})")]
    NotPerpendicular { inner: f64 },
    #[error("{what} failed after {attempts} attempts")]
    RetriesExhausted { what: String, attempts: usize },
}
