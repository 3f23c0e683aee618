//! Exact, analytic and random-matrix engines for traces in free products of
//! abelian tracial algebras.
//!
//! * [`measures`]: Cauchy and R-transforms, free additive convolution of two
//!   projection laws, Stieltjes inversion, atoms and moments.
//! * [`freeprod`]: exact traces of words in a free product of finite abelian
//!   algebras, centering, conditional expectations and the S-basis algebra.
//! * [`twoproj`]: quadrature model of two free projections of equal trace and
//!   the sign unitary intertwining them.
//! * [`rmt`]: seeded random-matrix scenes, freeness statistics and commutant
//!   dimension.

pub mod freeprod;
pub mod measures;
pub mod numeric;
pub mod rmt;
pub mod twoproj;

pub use num_complex::Complex64 as C64;

/// Exact rational numbers with arbitrary-precision numerator and denominator.
pub type Rational = num_rational::BigRational;

/// `num / den` as an exact rational. Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// Nearest f64 to an exact rational.
pub fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"0.25"` exactly.
pub fn parse_ratio(text: &str) -> Option<Rational> {
    let t = text.trim();
    if let Some((int, frac)) = t.split_once('.') {
        let digits = format!("{int}{frac}");
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let num: num_bigint::BigInt = digits.parse().ok()?;
        let den = num_traits::pow(num_bigint::BigInt::from(10), frac.len());
        return Some(Rational::new(num, den));
    }
    t.parse::<Rational>().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ratios() {
        assert_eq!(parse_ratio("1/3"), Some(ratio(1, 3)));
        assert_eq!(parse_ratio(" 2 "), Some(ratio(2, 1)));
        assert_eq!(parse_ratio("0.25"), Some(ratio(1, 4)));
        assert_eq!(parse_ratio("-1.5"), Some(ratio(-3, 2)));
        assert_eq!(parse_ratio("1."), None);
        assert_eq!(parse_ratio("x"), None);
        assert_eq!(parse_ratio("1/0"), None);
    }
}
