//! Exact scalar types that can carry MV-chain values.
//!
//! Everything in the engine is generic over [`Scalar`]. Integer-only types
//! serve finite chains; [`Field`] types additionally admit the real interval
//! and the expectation and transport machinery, which divide.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio, Rational64};
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// An exact, totally ordered number type.
pub trait Scalar:
    Clone + Ord + Hash + Debug + Display + Num + Signed + FromPrimitive + Send + Sync + 'static
{
    /// Exact image of `r`, or `None` when `r` is not representable.
    fn from_ratio(r: &BigRational) -> Option<Self>;

    fn to_ratio(&self) -> BigRational;

    fn is_integral(&self) -> bool;

    /// Whether division is exact, so non-integral values are representable.
    fn is_field() -> bool;

    fn from_count(n: u64) -> Self {
        <Self as FromPrimitive>::from_u64(n).expect("scale fits the scalar type")
    }

    /// `p/q` for rationals, plain digits for integers.
    fn to_fraction_string(&self) -> String {
        let r = self.to_ratio();
        if r.is_integer() {
            r.numer().to_string()
        } else {
            format!("{}/{}", r.numer(), r.denom())
        }
    }
}

/// Scalars with exact division.
pub trait Field: Scalar {}

impl Scalar for BigRational {
    fn from_ratio(r: &BigRational) -> Option<Self> {
        Some(r.clone())
    }

    fn to_ratio(&self) -> BigRational {
        self.clone()
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }

    fn is_field() -> bool {
        true
    }
}

impl Field for BigRational {}

impl Scalar for Rational64 {
    fn from_ratio(r: &BigRational) -> Option<Self> {
        Some(Ratio::new(r.numer().to_i64()?, r.denom().to_i64()?))
    }

    fn to_ratio(&self) -> BigRational {
        Ratio::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }

    fn is_field() -> bool {
        true
    }
}

impl Field for Rational64 {}

impl Scalar for i64 {
    fn from_ratio(r: &BigRational) -> Option<Self> {
        if r.is_integer() {
            r.numer().to_i64()
        } else {
            None
        }
    }

    fn to_ratio(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(*self))
    }

    fn is_integral(&self) -> bool {
        true
    }

    fn is_field() -> bool {
        false
    }
}

impl Scalar for BigInt {
    fn from_ratio(r: &BigRational) -> Option<Self> {
        r.is_integer().then(|| r.numer().clone())
    }

    fn to_ratio(&self) -> BigRational {
        BigRational::from_integer(self.clone())
    }

    fn is_integral(&self) -> bool {
        true
    }

    fn is_field() -> bool {
        false
    }
}

/// Parses an integer, `p/q`, or finite decimal literal into an exact rational.
pub fn parse_ratio(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    if body.is_empty() {
        return None;
    }
    let value = if let Some((p, q)) = body.split_once('/') {
        let p = parse_digits(p)?;
        let q = parse_digits(q)?;
        if q.is_zero() {
            return None;
        }
        BigRational::new(p, q)
    } else if let Some((int, frac)) = body.split_once('.') {
        if int.is_empty() && frac.is_empty() {
            return None;
        }
        let int = if int.is_empty() { BigInt::zero() } else { parse_digits(int)? };
        let frac_digits = if frac.is_empty() { BigInt::zero() } else { parse_digits(frac)? };
        let scale = num_traits::pow(BigInt::from(10u8), frac.len());
        BigRational::new(int * &scale + frac_digits, scale)
    } else {
        BigRational::from_integer(parse_digits(body)?)
    };
    Some(if negative { -value } else { value })
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Parses a literal straight into `T`, failing when it is not representable.
pub fn parse_scalar<T: Scalar>(text: &str) -> Option<T> {
    T::from_ratio(&parse_ratio(text)?)
}

pub(crate) fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}
