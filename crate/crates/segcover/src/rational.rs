//! Exact rational numbers.
//!
//! Every coordinate in this crate is a `Rational`: arbitrary-precision
//! numerator, positive denominator, always in lowest terms. The text form is
//! `"p/q"`, or plain `"p"` when the denominator is 1; that form is also the
//! JSON encoding, so values round-trip exactly.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RationalParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid integer in rational literal: {0:?}")]
    BadInteger(String),
    #[error("zero denominator in rational literal")]
    ZeroDenominator,
    #[error("too many '/' in rational literal: {0:?}")]
    TooManySlashes(String),
}

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Rational(BigRational::from_integer(n))
    }

    pub fn from_big(numer: BigInt, denom: BigInt) -> Self {
        assert!(!denom.is_zero(), "zero denominator");
        Rational(BigRational::new(numer, denom))
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

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn pow(&self, exp: i32) -> Self {
        Rational(self.0.pow(exp))
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Smallest integer ≥ self.
    pub fn ceil_bigint(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    /// Lossy conversion for display scaling only; never used for decisions.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact decimal expansion truncated toward zero at `digits` fractional
    /// digits. Used for SVG coordinates, where a fixed textual form matters
    /// more than the last ulp.
    pub fn to_decimal_string(&self, digits: u32) -> String {
        let sign = if self.0.is_negative() { "-" } else { "" };
        let num = self.0.numer().abs();
        let den = self.0.denom().clone();
        let int_part = &num / &den;
        let mut rem = &num % &den;
        let mut frac = String::new();
        for _ in 0..digits {
            rem *= 10;
            let digit = &rem / &den;
            rem %= &den;
            frac.push_str(&digit.to_string());
        }
        if digits == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac}")
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Rational {
    type Err = RationalParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(RationalParseError::Empty);
        }
        let mut parts = s.split('/');
        let numer_s = parts.next().ok_or(RationalParseError::Empty)?;
        let numer: BigInt = numer_s
            .trim()
            .parse()
            .map_err(|_| RationalParseError::BadInteger(numer_s.to_string()))?;
        match parts.next() {
            None => Ok(Rational(BigRational::from_integer(numer))),
            Some(denom_s) => {
                if parts.next().is_some() {
                    return Err(RationalParseError::TooManySlashes(s.to_string()));
                }
                let denom: BigInt = denom_s
                    .trim()
                    .parse()
                    .map_err(|_| RationalParseError::BadInteger(denom_s.to_string()))?;
                if denom.is_zero() {
                    return Err(RationalParseError::ZeroDenominator);
                }
                Ok(Rational(BigRational::new(numer, denom)))
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

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

impl PartialOrd<i64> for Rational {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        self.partial_cmp(&Rational::from_int(*other))
    }
}

impl PartialEq<i64> for Rational {
    fn eq(&self, other: &i64) -> bool {
        self == &Rational::from_int(*other)
    }
}

/// Shorthand used pervasively in tests: `rat("3/4")`.
pub fn rat(s: &str) -> Rational {
    s.parse().unwrap_or_else(|e| panic!("bad rational {s:?}: {e}"))
}
