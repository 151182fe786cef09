//! Exact rational evaluation of parameter predicates.
//!
//! Classification branches on exact equalities and on discriminant signs.
//! Parameters given as rationals are decided exactly. Float parameters are
//! converted exactly (every `f64` is a dyadic rational); an exactly-zero
//! result is zero, and a nonzero result inside the ambiguity band is
//! reported instead of guessed.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = BigRational;

/// Band around zero inside which a float-evaluated sign is refused.
pub const AMBIGUITY_BAND: f64 = 1e-10;

/// Tolerance for equality tests on float parameters.
pub const FLOAT_EQ_TOL: f64 = 1e-12;

/// Numeric types the parameter polynomials are evaluated in.
pub trait Scalar: Clone + Num + Signed + FromPrimitive {}
impl<T: Clone + Num + Signed + FromPrimitive> Scalar for T {}

pub fn lit<T: Scalar>(n: i64) -> T {
    T::from_i64(n).expect("small integer literal")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of_ordering(o: Ordering) -> Sign {
        match o {
            Ordering::Less => Sign::Negative,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Positive,
        }
    }
    pub fn is_negative(self) -> bool {
        self == Sign::Negative
    }
    pub fn is_nonnegative(self) -> bool {
        self != Sign::Negative
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
#[error("sign of {quantity} is ambiguous: float value {value:e} lies within {band:e} of zero")]
pub struct BoundaryAmbiguous {
    pub quantity: String,
    pub value: f64,
    pub band: f64,
}

#[derive(Debug, Clone, Error, PartialEq)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRationalError(pub String);

pub fn rational_from_f64(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(Rational::zero)
}

pub fn rational_to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"-0.125"` exactly.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let t = s.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(p, q));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{}{}", if int.is_empty() { "0" } else { int }, frac);
    let num = BigInt::from_str(&digits).map_err(|_| err())?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let r = Rational::new(num, den);
    Ok(if neg { -r } else { r })
}

pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Decides zero tests and signs of parameter expressions.
#[derive(Clone, Copy, Debug)]
pub struct Decider {
    /// Parameters were supplied as exact rationals.
    pub exact: bool,
}

impl Decider {
    pub fn new(exact: bool) -> Self {
        Decider { exact }
    }

    /// Zero test: exact on rationals, `|v| <= 1e-12` on floats.
    pub fn is_zero(&self, exact_value: &Rational) -> bool {
        if self.exact || exact_value.is_zero() {
            exact_value.is_zero()
        } else {
            rational_to_f64(exact_value).abs() <= FLOAT_EQ_TOL
        }
    }

    pub fn sign(&self, quantity: &str, exact_value: &Rational) -> Result<Sign, BoundaryAmbiguous> {
        let s = Sign::of_ordering(exact_value.cmp(&Rational::zero()));
        if self.exact || s == Sign::Zero {
            return Ok(s);
        }
        let v = rational_to_f64(exact_value);
        if v.abs() <= AMBIGUITY_BAND {
            return Err(BoundaryAmbiguous {
                quantity: quantity.to_string(),
                value: v,
                band: AMBIGUITY_BAND,
            });
        }
        Ok(s)
    }
}

/// Displays a float with 17 significant digits in `%.17g` style (trailing
/// zeros dropped, positional notation for moderate exponents). Always
/// parses back to the same `f64`.
pub struct Sig17(pub f64);

impl fmt::Display for Sig17 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let x = self.0;
        if !x.is_finite() {
            return write!(f, "{x}");
        }
        if x == 0.0 {
            return f.write_str(if x.is_sign_negative() { "-0.0" } else { "0.0" });
        }
        let sci = format!("{x:.16e}");
        let (mantissa, exp) = sci.split_once('e').expect("exponent");
        let exp: i32 = exp.parse().expect("exponent");
        if (-5..17).contains(&exp) {
            let decimals = (16 - exp).max(0) as usize;
            let fixed = format!("{x:.decimals$}");
            let trimmed = if fixed.contains('.') { fixed.trim_end_matches('0') } else { &fixed };
            if let Some(t) = trimmed.strip_suffix('.') {
                write!(f, "{t}.0")
            } else {
                f.write_str(trimmed)
            }
        } else {
            let m = mantissa.trim_end_matches('0').trim_end_matches('.');
            write!(f, "{m}e{exp}")
        }
    }
}
