//! Scalar fields a tensor can live over.
//!
//! Exact kinds (`BigInt`, `BigRational`) never convert to `f64` implicitly;
//! conversions go through [`Scalar::to_f64`] or [`Scalar::to_rational`] at
//! the call site.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    Int,
    Rational,
    Float64,
}

impl ScalarKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalarKind::Int => "int",
            ScalarKind::Rational => "rational",
            ScalarKind::Float64 => "float64",
        }
    }

    pub fn is_exact(self) -> bool {
        self != ScalarKind::Float64
    }
}

pub trait Scalar: Num + Clone + PartialEq + PartialOrd + Debug + Send + Sync + 'static {
    const KIND: ScalarKind;

    fn to_f64(&self) -> f64;

    /// Exact rational value; `None` for non-finite floats.
    fn to_rational(&self) -> Option<BigRational>;

    fn from_u64(v: u64) -> Self;

    fn is_negative_value(&self) -> bool {
        *self < Self::zero()
    }
}

impl Scalar for BigInt {
    const KIND: ScalarKind = ScalarKind::Int;

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_rational(&self) -> Option<BigRational> {
        Some(BigRational::from_integer(self.clone()))
    }

    fn from_u64(v: u64) -> Self {
        BigInt::from(v)
    }
}

impl Scalar for BigRational {
    const KIND: ScalarKind = ScalarKind::Rational;

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }

    fn from_u64(v: u64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

impl Scalar for f64 {
    const KIND: ScalarKind = ScalarKind::Float64;

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_rational(&self) -> Option<BigRational> {
        BigRational::from_f64(*self)
    }

    fn from_u64(v: u64) -> Self {
        v as f64
    }
}

/// `"p/q"` for proper fractions, `"p"` for integers.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Always `"p/q"`, used by the rational tensor format.
pub fn format_rational_pq(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"p"`, `"p/q"` or a finite decimal such as `"-1.25"` into an exact
/// rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| usage(format!("bad numerator in {s:?}")))?;
        let q = BigInt::from_str(q.trim()).map_err(|_| usage(format!("bad denominator in {s:?}")))?;
        if q.is_zero() {
            return Err(usage(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Ok(i) = BigInt::from_str(s) {
        return Ok(BigRational::from_integer(i));
    }
    parse_decimal(s).ok_or_else(|| usage(format!("not a rational number: {s:?}")))
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (mantissa, exp) = match body.find(['e', 'E']) {
        Some(pos) => (&body[..pos], body[pos + 1..].parse::<i32>().ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(&digits).ok()?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let mut r = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    Some(r)
}

pub fn parse_bigint(s: &str) -> Result<BigInt> {
    BigInt::from_str(s.trim()).map_err(|_| usage(format!("not an integer: {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_three_spellings() {
        assert_eq!(parse_rational("3").unwrap(), BigRational::from_integer(3.into()));
        assert_eq!(
            parse_rational("-6/4").unwrap(),
            BigRational::new((-3).into(), 2.into())
        );
        assert_eq!(
            parse_rational("1.25").unwrap(),
            BigRational::new(5.into(), 4.into())
        );
        assert_eq!(
            parse_rational("-2.5e-1").unwrap(),
            BigRational::new((-1).into(), 4.into())
        );
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn formatting() {
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(format_rational(&half), "1/2");
        assert_eq!(format_rational(&BigRational::from_integer(7.into())), "7");
        assert_eq!(format_rational_pq(&BigRational::from_integer(7.into())), "7/1");
    }
}
