//! JSON literals for algebras and words.
//!
//! ```json
//! {"algebras": [{"id": 1, "weights": [[1, 2], [1, 2]]}, {"id": 2, "weights": [[1, 2], [1, 2]]}],
//!  "word": [{"algebra": 1, "values": [[1, 1], [0, 1]]}, {"algebra": 2, "values": [[0, 1], [1, 1]]}]}
//! ```
//!
//! Rationals are `[num, den]` pairs, integers or strings such as `"1/3"`; complex values are
//! `{"re": r, "im": r}`. An algebra without `id` takes its 1-based position.

use serde_json::Value;

use super::algebra::{AlgebraElement, AlgebraSet, FiniteAbelianAlgebra, FreeWord};
use super::scalar::GaussianRational;
use super::FreeProdError;
use crate::Rational;

fn bad(msg: impl Into<String>) -> FreeProdError {
    FreeProdError::Json(msg.into())
}

pub fn parse_rational(v: &Value) -> Result<Rational, FreeProdError> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(|n| Rational::from_integer(n.into()))
            .ok_or_else(|| bad(format!("{n} is not an integer"))),
        Value::Array(pair) if pair.len() == 2 => {
            let num = pair[0].as_i64().ok_or_else(|| bad(format!("bad numerator in {v}")))?;
            let den = pair[1].as_i64().ok_or_else(|| bad(format!("bad denominator in {v}")))?;
            if den == 0 {
                return Err(bad(format!("zero denominator in {v}")));
            }
            Ok(Rational::new(num.into(), den.into()))
        }
        Value::String(s) => crate::parse_ratio(s).ok_or_else(|| bad(format!("cannot parse rational {s:?}"))),
        _ => Err(bad(format!("expected a rational, found {v}"))),
    }
}

pub fn parse_value(v: &Value) -> Result<GaussianRational, FreeProdError> {
    match v {
        Value::Object(map) => {
            let re = map.get("re").map(parse_rational).transpose()?.unwrap_or_default();
            let im = map.get("im").map(parse_rational).transpose()?.unwrap_or_default();
            Ok(GaussianRational::new(re, im))
        }
        _ => Ok(GaussianRational::real(parse_rational(v)?)),
    }
}

/// Parses `{"algebras": [...], "word": [...]}`.
pub fn parse_word_literal(text: &str) -> Result<(AlgebraSet, FreeWord), FreeProdError> {
    let root: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let algebras = root
        .get("algebras")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing \"algebras\" array"))?;
    let mut factors = Vec::new();
    for (pos, a) in algebras.iter().enumerate() {
        let id = match a.get("id") {
            Some(v) => v.as_u64().ok_or_else(|| bad(format!("bad id {v}")))? as usize,
            None => pos + 1,
        };
        let weights = a
            .get("weights")
            .and_then(Value::as_array)
            .ok_or_else(|| bad(format!("algebra {id} lacks \"weights\"")))?
            .iter()
            .map(parse_rational)
            .collect::<Result<Vec<_>, _>>()?;
        factors.push(FiniteAbelianAlgebra::new(id, weights)?);
    }
    let set = AlgebraSet::new(factors)?;
    let letters = root
        .get("word")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing \"word\" array"))?
        .iter()
        .map(|l| {
            let algebra_id = l
                .get("algebra")
                .and_then(Value::as_u64)
                .ok_or_else(|| bad(format!("letter {l} lacks \"algebra\"")))? as usize;
            let values = l
                .get("values")
                .and_then(Value::as_array)
                .ok_or_else(|| bad(format!("letter {l} lacks \"values\"")))?
                .iter()
                .map(parse_value)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(AlgebraElement { algebra_id, values })
        })
        .collect::<Result<Vec<_>, FreeProdError>>()?;
    let word = FreeWord::new(letters);
    word.validate(&set)?;
    Ok((set, word))
}
