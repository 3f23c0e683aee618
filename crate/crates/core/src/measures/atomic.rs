use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::MeasureError;
use crate::{rational_to_f64, Rational};

/// A finitely supported probability measure with exact masses.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicMeasure {
    atoms: Vec<(f64, Rational)>,
}

/// Serialized form: `{"atoms": [[location, mass_numerator, mass_denominator], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MeasureJson {
    pub atoms: Vec<(f64, i64, i64)>,
}

impl AtomicMeasure {
    /// Builds a measure, sorting atoms by location.
    pub fn new(mut atoms: Vec<(f64, Rational)>) -> Result<Self, MeasureError> {
        if atoms.is_empty() {
            return Err(MeasureError::InvalidMeasure("no atoms".into()));
        }
        for (loc, mass) in &atoms {
            if !loc.is_finite() {
                return Err(MeasureError::InvalidMeasure(format!("location {loc} is not finite")));
            }
            if !mass.is_positive() || *mass > Rational::one() {
                return Err(MeasureError::InvalidMeasure(format!("mass {mass} is outside (0, 1]")));
            }
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        if atoms.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(MeasureError::InvalidMeasure("repeated location".into()));
        }
        let total = atoms.iter().fold(Rational::zero(), |acc, (_, m)| acc + m);
        if !total.is_one() {
            return Err(MeasureError::InvalidMeasure(format!("total mass {total} != 1")));
        }
        Ok(Self { atoms })
    }

    pub fn dirac(location: f64) -> Self {
        Self::new(vec![(location, Rational::one())]).expect("a single unit atom is valid")
    }

    /// Law of a projection of trace `alpha`: mass `1 - alpha` at 0, `alpha` at 1.
    pub fn bernoulli(alpha: &Rational) -> Result<Self, MeasureError> {
        if !alpha.is_positive() || *alpha >= Rational::one() {
            return Err(MeasureError::InvalidAlpha(rational_to_f64(alpha)));
        }
        Self::new(vec![(0.0, Rational::one() - alpha), (1.0, alpha.clone())])
    }

    pub fn atoms(&self) -> &[(f64, Rational)] {
        &self.atoms
    }

    /// `int t^k dmu` in floating point.
    pub fn moment(&self, k: u32) -> f64 {
        self.atoms
            .iter()
            .map(|(t, m)| rational_to_f64(m) * t.powi(k as i32))
            .sum()
    }

    pub fn support_radius(&self) -> f64 {
        self.atoms.iter().map(|(t, _)| t.abs()).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<MeasureJson, MeasureError> {
        use num_traits::ToPrimitive;
        let atoms = self
            .atoms
            .iter()
            .map(|(t, m)| {
                let num = m.numer().to_i64();
                let den = m.denom().to_i64();
                match (num, den) {
                    (Some(n), Some(d)) => Ok((*t, n, d)),
                    _ => Err(MeasureError::InvalidMeasure(format!("mass {m} does not fit in i64"))),
                }
            })
            .collect::<Result<_, _>>()?;
        Ok(MeasureJson { atoms })
    }

    pub fn from_json(json: &MeasureJson) -> Result<Self, MeasureError> {
        let atoms = json
            .atoms
            .iter()
            .map(|&(t, n, d)| {
                if d == 0 {
                    Err(MeasureError::InvalidMeasure("zero denominator".into()))
                } else {
                    Ok((t, crate::ratio(n, d)))
                }
            })
            .collect::<Result<_, _>>()?;
        Self::new(atoms)
    }
}
