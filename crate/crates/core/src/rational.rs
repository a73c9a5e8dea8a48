//! Exact rational scalars.
//!
//! Thin newtype over [`num_rational::BigRational`]. Geometric strands raise
//! ratios to large powers, so a fixed-width numerator would overflow long
//! before the index ranges we check.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Exact rational number, always kept in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal `{0}` (expected an integer or `p/q`)")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

impl Rational {
    /// `numer / denom`, reduced.
    ///
    /// Panics if `denom == 0`.
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// `self^exp`, exact.
    pub fn pow(&self, exp: u32) -> Self {
        Rational(BigRational::new_raw(
            Pow::pow(self.0.numer(), exp),
            Pow::pow(self.0.denom(), exp),
        ))
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn min(self, other: Self) -> Self {
        std::cmp::min(self, other)
    }

    pub fn max(self, other: Self) -> Self {
        std::cmp::max(self, other)
    }

    /// Nearest `f64`. Values outside the `f64` range saturate.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| {
            if self.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        })
    }

    /// Natural logarithm in floating point, valid far outside the `f64`
    /// range. `None` unless positive.
    pub fn ln_approx(&self) -> Option<f64> {
        fn ln_big(x: &BigInt) -> f64 {
            let shift = x.bits().saturating_sub(64);
            let top = (x.magnitude() >> shift).to_f64().unwrap_or(f64::MAX);
            top.ln() + shift as f64 * std::f64::consts::LN_2
        }
        self.is_positive().then(|| ln_big(self.0.numer()) - ln_big(self.0.denom()))
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseRationalError::Empty);
        }
        let malformed = || ParseRationalError::Malformed(s.to_string());
        let parse_int = |t: &str| -> Result<BigInt, ParseRationalError> {
            let t = t.trim();
            let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(malformed());
            }
            t.parse::<BigInt>().map_err(|_| malformed())
        };
        match s.split_once('/') {
            None => Ok(Rational(BigRational::from_integer(parse_int(s)?))),
            Some((p, q)) => {
                let numer = parse_int(p)?;
                let denom = parse_int(q)?;
                if denom.is_zero() {
                    return Err(ParseRationalError::ZeroDenominator(s.to_string()));
                }
                Ok(Rational(BigRational::new(numer, denom)))
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Accepts `"p/q"` strings or plain JSON integers.
impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Int(n) => Ok(Rational::from_integer(n)),
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// gcd with a fast path when either side fits in a machine word. The generic
/// binary gcd is quadratic in the size of the larger operand, which dominates
/// once geometric strands reach thousands of bits.
fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    fn word_gcd(mut x: u64, mut y: u64) -> u64 {
        while y != 0 {
            (x, y) = (y, x % y);
        }
        x
    }
    let small = |x: &BigInt| x.magnitude().to_u64();
    match (small(a), small(b)) {
        (Some(x), Some(y)) => BigInt::from(word_gcd(x, y)),
        (Some(0), None) => b.abs(),
        (None, Some(0)) => a.abs(),
        (Some(x), None) => BigInt::from(word_gcd(x, (b.magnitude() % x).to_u64().unwrap_or(0))),
        (None, Some(y)) => BigInt::from(word_gcd(y, (a.magnitude() % y).to_u64().unwrap_or(0))),
        (None, None) => a.gcd(b),
    }
}

fn raw(numer: BigInt, denom: BigInt) -> Rational {
    Rational(BigRational::new_raw(numer, denom))
}

// Both operands are in lowest terms with positive denominators.
fn add_reduced(x: &BigRational, y: &BigRational, negate_y: bool) -> Rational {
    let (a, b) = (x.numer(), x.denom());
    let c = if negate_y { -y.numer() } else { y.numer().clone() };
    let d = y.denom();
    let g = gcd(b, d);
    if g.is_one() {
        return raw(a * d + c * b, b * d);
    }
    let t = a * (d / &g) + c * (b / &g);
    let g2 = gcd(&t, &g);
    if t.is_zero() {
        return Rational::zero();
    }
    raw(&t / &g2, (b / &g) * (d / &g2))
}

fn mul_reduced(x: &BigRational, y: &BigRational) -> Rational {
    if x.is_zero() || y.is_zero() {
        return Rational::zero();
    }
    let g1 = gcd(x.numer(), y.denom());
    let g2 = gcd(y.numer(), x.denom());
    raw((x.numer() / &g1) * (y.numer() / &g2), (x.denom() / &g2) * (y.denom() / &g1))
}

fn div_reduced(x: &BigRational, y: &BigRational) -> Rational {
    assert!(!y.is_zero(), "division by zero");
    let (mut numer, mut denom) = (y.denom().clone(), y.numer().clone());
    if denom.is_negative() {
        numer = -numer;
        denom = -denom;
    }
    mul_reduced(x, &BigRational::new_raw(numer, denom))
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, |$x:ident, $y:ident| $body:expr) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                let ($x, $y) = (&self.0, &rhs.0);
                $body
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                (&self).$method(rhs)
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |x, y| add_reduced(x, y, false));
forward_binop!(Sub, sub, |x, y| add_reduced(x, y, true));
forward_binop!(Mul, mul, |x, y| mul_reduced(x, y));
forward_binop!(Div, div, |x, y| div_reduced(x, y));

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}
