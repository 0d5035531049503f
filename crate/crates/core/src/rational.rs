//! Exact rational numbers and small construction/parsing helpers.
//!
//! `Rat` is an arbitrary-precision rational kept in lowest terms with a
//! positive denominator. Every numeric value in this crate flows through it.

use alloc::string::String;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

/// Integer-valued rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational `n/d`. Panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_usize(n: usize) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Floor of a rational as an arbitrary-precision integer.
pub fn floor_int(r: &Rat) -> BigInt {
    r.floor().to_integer()
}

/// Ceiling of a rational as an arbitrary-precision integer.
pub fn ceil_int(r: &Rat) -> BigInt {
    r.ceil().to_integer()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRatError(pub String);

impl fmt::Display for ParseRatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rational literal `{}`", self.0)
    }
}

/// Parses an integer (`"-3"`) or fraction (`"5/2"`) literal.
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let s = s.trim();
    let err = || ParseRatError(String::from(s));
    match s.split_once('/') {
        None => {
            let n: BigInt = s.parse().map_err(|_| err())?;
            Ok(Rat::from_integer(n))
        }
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| err())?;
            let q: BigInt = q.trim().parse().map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            Ok(Rat::new(p, q))
        }
    }
}

/// Formats a rational as `p` or `p/q`, matching the instance/dump schema.
pub fn fmt_rat(r: &Rat) -> String {
    use alloc::format;
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// True if the rational is an integer.
pub fn is_integer(r: &Rat) -> bool {
    r.denom().is_one()
}

/// True if the rational is 0 or 1.
pub fn is_binary(r: &Rat) -> bool {
    r.is_zero() || r.is_one()
}

/// |r|
pub fn abs(r: &Rat) -> Rat {
    r.abs()
}
