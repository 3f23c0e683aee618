//! Named matrices of one seeded random-matrix sample.

use std::collections::BTreeMap;

use super::linalg::{adjoint, frobenius_distance, unitarity_defect, CMat};
use super::RmtError;

pub const UNITARY_TOLERANCE: f64 = 1e-10;
pub const PROJECTION_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixTag {
    Unitary,
    Projection,
    SelfAdjoint,
    General,
}

/// Matrices of one sample, keyed by name; the trace functional is `Tr / N`.
#[derive(Clone, Debug)]
pub struct MatrixScene {
    n: usize,
    seed: u64,
    matrices: BTreeMap<String, (MatrixTag, CMat)>,
}

fn defect(tag: MatrixTag, m: &CMat) -> f64 {
    match tag {
        MatrixTag::Unitary => unitarity_defect(m),
        MatrixTag::Projection => frobenius_distance(&(m * m), m).max(frobenius_distance(m, &adjoint(m))),
        MatrixTag::SelfAdjoint => frobenius_distance(m, &adjoint(m)),
        MatrixTag::General => 0.0,
    }
}

fn tolerance(tag: MatrixTag) -> f64 {
    match tag {
        MatrixTag::Projection => PROJECTION_TOLERANCE,
        _ => UNITARY_TOLERANCE,
    }
}

impl MatrixScene {
    pub fn new(n: usize, seed: u64) -> Self {
        Self { n, seed, matrices: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Stores `m` after checking the invariant of its tag.
    pub fn insert(&mut self, name: impl Into<String>, tag: MatrixTag, m: CMat) -> Result<(), RmtError> {
        let name = name.into();
        if m.nrows() != self.n || m.ncols() != self.n {
            return Err(RmtError::InvalidArgument(format!(
                "{name} is {}x{}, scene dimension is {}",
                m.nrows(),
                m.ncols(),
                self.n
            )));
        }
        let d = defect(tag, &m);
        if !(d <= tolerance(tag)) {
            return Err(RmtError::InvariantViolation { name, defect: d });
        }
        self.matrices.insert(name, (tag, m));
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&CMat, RmtError> {
        self.matrices
            .get(name)
            .map(|(_, m)| m)
            .ok_or_else(|| RmtError::InvalidArgument(format!("scene has no matrix named {name:?}")))
    }

    pub fn tag(&self, name: &str) -> Option<MatrixTag> {
        self.matrices.get(name).map(|(t, _)| *t)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.matrices.keys().map(String::as_str)
    }

    /// Largest invariant defect over all tagged matrices, with its name.
    pub fn worst_defect(&self) -> Option<(String, f64)> {
        self.matrices
            .iter()
            .map(|(k, (t, m))| (k.clone(), defect(*t, m) / tolerance(*t)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Re-checks every invariant.
    pub fn check_invariants(&self) -> Result<(), RmtError> {
        for (name, (tag, m)) in &self.matrices {
            let d = defect(*tag, m);
            if !(d <= tolerance(*tag)) {
                return Err(RmtError::InvariantViolation { name: name.clone(), defect: d });
            }
        }
        Ok(())
    }
}
