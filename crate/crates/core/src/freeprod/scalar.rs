//! Exact scalar fields: Gaussian rationals and real quadratic surds.

use std::fmt::{self, Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{rational_to_f64, Rational, C64};

/// Exact arithmetic needed by the trace engine.
pub trait ExactScalar: Clone + PartialEq + Eq + Hash + Debug + Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: Rational) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    /// Complex conjugate (identity on real fields).
    fn conj(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn to_complex(&self) -> C64;

    fn scaled(&self, r: &Rational) -> Self {
        self.times(&Self::from_rational(r.clone()))
    }
}

/// `re + im * i` with rational parts.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Self { re, im: Rational::zero() }
    }
}

impl Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{} - {}i", self.re, -self.im.clone())
        } else {
            write!(f, "{} + {}i", self.re, self.im)
        }
    }
}

impl ExactScalar for GaussianRational {
    fn zero() -> Self {
        Self::real(Rational::zero())
    }

    fn one() -> Self {
        Self::real(Rational::one())
    }

    fn from_rational(r: Rational) -> Self {
        Self::real(r)
    }

    fn plus(&self, o: &Self) -> Self {
        Self::new(&self.re + &o.re, &self.im + &o.im)
    }

    fn minus(&self, o: &Self) -> Self {
        Self::new(&self.re - &o.re, &self.im - &o.im)
    }

    fn times(&self, o: &Self) -> Self {
        Self::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }

    fn negated(&self) -> Self {
        Self::new(-self.re.clone(), -self.im.clone())
    }

    fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn to_complex(&self) -> C64 {
        C64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    fn scaled(&self, r: &Rational) -> Self {
        Self::new(&self.re * r, &self.im * r)
    }
}

/// `a + b * sqrt(d)` with `a, b` rational and `d` a squarefree integer > 1,
/// or `d = 0` when `b = 0`. Canonical, so equality is structural.
///
/// Arithmetic between two surds with different nonzero radicands is outside
/// the field and panics.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QuadraticSurd {
    a: Rational,
    b: Rational,
    d: BigInt,
}

impl QuadraticSurd {
    pub fn rational(a: Rational) -> Self {
        Self { a, b: Rational::zero(), d: BigInt::zero() }
    }

    /// `a + b sqrt(d)` for any nonnegative rational `d`, canonicalized.
    pub fn new(a: Rational, b: Rational, d: &Rational) -> Self {
        assert!(!d.is_negative(), "radicand must be nonnegative");
        let root = Self::sqrt(d);
        Self::rational(a).plus(&root.scaled(&b))
    }

    /// Exact `sqrt(r)` for a nonnegative rational `r`.
    pub fn sqrt(r: &Rational) -> Self {
        assert!(!r.is_negative(), "square root of a negative rational");
        if r.is_zero() {
            return Self::rational(Rational::zero());
        }
        // sqrt(p/q) = sqrt(p q) / q, then pull squares out of p q.
        let pq = r.numer() * r.denom();
        let (square_root_part, free) = split_square(&pq);
        let coeff = Rational::new(square_root_part, r.denom().clone());
        if free.is_one() {
            Self::rational(coeff)
        } else {
            Self { a: Rational::zero(), b: coeff, d: free }
        }
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn surd_part(&self) -> &Rational {
        &self.b
    }

    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    fn common_radicand(&self, o: &Self) -> BigInt {
        match (self.d.is_zero(), o.d.is_zero()) {
            (true, _) => o.d.clone(),
            (_, true) => self.d.clone(),
            _ => {
                assert_eq!(self.d, o.d, "surds with different radicands are not in one field");
                self.d.clone()
            }
        }
    }

    fn canonical(a: Rational, b: Rational, d: BigInt) -> Self {
        if b.is_zero() {
            Self::rational(a)
        } else {
            Self { a, b, d }
        }
    }
}

/// Writes `n = s^2 * f` with `f` squarefree (trial division; exact for the
/// small radicands that arise here, and a fixed deterministic bound otherwise).
fn split_square(n: &BigInt) -> (BigInt, BigInt) {
    let mut rest = n.clone();
    let mut square = BigInt::one();
    let mut p = BigInt::from(2u32);
    let mut tried = 0u32;
    while &p * &p <= rest && tried < 1_000_000 {
        let pp = &p * &p;
        while rest.is_multiple_of(&pp) {
            rest /= &pp;
            square *= &p;
        }
        p += 1u32;
        tried += 1;
    }
    (square, rest)
}

impl Display for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let surd = format!("{}*sqrt({})", self.b.abs(), self.d);
        match (self.a.is_zero(), self.b.is_negative()) {
            (true, false) => write!(f, "{surd}"),
            (true, true) => write!(f, "-{surd}"),
            (false, false) => write!(f, "{} + {surd}", self.a),
            (false, true) => write!(f, "{} - {surd}", self.a),
        }
    }
}

impl ExactScalar for QuadraticSurd {
    fn zero() -> Self {
        Self::rational(Rational::zero())
    }

    fn one() -> Self {
        Self::rational(Rational::one())
    }

    fn from_rational(r: Rational) -> Self {
        Self::rational(r)
    }

    fn plus(&self, o: &Self) -> Self {
        let d = self.common_radicand(o);
        Self::canonical(&self.a + &o.a, &self.b + &o.b, d)
    }

    fn minus(&self, o: &Self) -> Self {
        let d = self.common_radicand(o);
        Self::canonical(&self.a - &o.a, &self.b - &o.b, d)
    }

    fn times(&self, o: &Self) -> Self {
        let d = self.common_radicand(o);
        let dr = Rational::from_integer(d.clone());
        let a = &self.a * &o.a + &self.b * &o.b * dr;
        let b = &self.a * &o.b + &self.b * &o.a;
        Self::canonical(a, b, d)
    }

    fn negated(&self) -> Self {
        Self::canonical(-self.a.clone(), -self.b.clone(), self.d.clone())
    }

    fn conj(&self) -> Self {
        self.clone()
    }

    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn to_complex(&self) -> C64 {
        let d = self.d.to_f64().unwrap_or(f64::NAN);
        C64::new(rational_to_f64(&self.a) + rational_to_f64(&self.b) * d.sqrt(), 0.0)
    }

    fn scaled(&self, r: &Rational) -> Self {
        Self::canonical(&self.a * r, &self.b * r, self.d.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;

    #[test]
    fn sqrt_canonicalizes() {
        let s = QuadraticSurd::sqrt(&ratio(3, 16));
        assert_eq!(s.surd_part(), &ratio(1, 4));
        assert_eq!(s.radicand(), &BigInt::from(3));
        assert_eq!(QuadraticSurd::sqrt(&ratio(9, 4)), QuadraticSurd::rational(ratio(3, 2)));
        assert_eq!(QuadraticSurd::sqrt(&ratio(2, 9)).radicand(), &BigInt::from(2));
        assert_eq!(QuadraticSurd::sqrt(&ratio(12, 1)).surd_part(), &ratio(2, 1));
    }

    #[test]
    fn surd_arithmetic() {
        let r3 = QuadraticSurd::sqrt(&ratio(3, 1));
        assert_eq!(r3.times(&r3), QuadraticSurd::rational(ratio(3, 1)));
        let x = QuadraticSurd::new(ratio(1, 2), ratio(1, 3), &ratio(3, 1));
        let y = x.minus(&x);
        assert!(y.is_zero());
        assert_eq!(y.radicand(), &BigInt::zero());
        assert!((x.to_complex().re - (0.5 + 3f64.sqrt() / 3.0)).abs() < 1e-15);
        assert_eq!(format!("{}", x.negated()), "-1/2 - 1/3*sqrt(3)");
    }

    #[test]
    #[should_panic]
    fn mixed_radicands_panic() {
        let _ = QuadraticSurd::sqrt(&ratio(2, 1)).plus(&QuadraticSurd::sqrt(&ratio(3, 1)));
    }

    #[test]
    fn gaussian_arithmetic() {
        let i = GaussianRational::new(ratio(0, 1), ratio(1, 1));
        assert_eq!(i.times(&i), GaussianRational::real(ratio(-1, 1)));
        assert_eq!(i.conj().plus(&i), GaussianRational::zero());
        assert_eq!(format!("{}", GaussianRational::new(ratio(1, 2), ratio(-3, 4))), "1/2 - 3/4i");
    }
}
