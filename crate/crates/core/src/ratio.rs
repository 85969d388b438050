//! Helpers around exact rationals: construction shorthands, integrality
//! tests, and the JSON coefficient encoding shared by all element types
//! (a plain JSON number for integers that fit in i64, a decimal string for
//! larger integers, and a `"num/den"` string for proper fractions).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Exact rational number with arbitrary-precision numerator and denominator.
pub type Rat = BigRational;

pub fn rat_int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_frac(num: i64, den: i64) -> Rat {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn is_integer(x: &Rat) -> bool {
    x.denom().is_one()
}

/// True when x is an integer with |x| ≤ bound (used to assert the
/// "denominator divides 2" shape of decomposition coefficients).
pub fn denominator_divides(x: &Rat, d: u64) -> bool {
    (BigInt::from(d) % x.denom()).is_zero()
}

pub fn json_from_rat(x: &Rat) -> serde_json::Value {
    if is_integer(x) {
        if let Some(n) = x.numer().to_i64() {
            return serde_json::Value::from(n);
        }
        return serde_json::Value::from(x.numer().to_string());
    }
    serde_json::Value::from(format!("{}/{}", x.numer(), x.denom()))
}

pub fn rat_from_json(v: &serde_json::Value) -> Result<Rat> {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(rat_int(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigRational::from_integer(BigInt::from(u)))
            } else {
                Err(Error::Parse(format!(
                    "non-integer JSON number {n}; use a \"num/den\" string for fractions"
                )))
            }
        }
        serde_json::Value::String(s) => rat_from_str(s),
        other => Err(Error::Parse(format!("expected number or string, got {other}"))),
    }
}

pub fn rat_from_str(s: &str) -> Result<Rat> {
    let parse_int = |t: &str| {
        BigInt::from_str(t.trim()).map_err(|e| Error::Parse(format!("bad integer {t:?}: {e}")))
    };
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(s)?)),
        Some((num, den)) => {
            let d = parse_int(den)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(parse_int(num)?, d))
        }
    }
}

/// Renders integers bare and fractions as "num/den" (matches the JSON encoding).
pub fn rat_to_string(x: &Rat) -> String {
    if is_integer(x) {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Signed decimal rendering with the given number of fraction digits,
/// for display-only fields (exact values stay rational everywhere else).
pub fn rat_to_decimal(x: &Rat, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (x * BigRational::from_integer(scale.clone())).round();
    let n = scaled.numer().abs();
    let sign = if scaled.numer().is_negative() { "-" } else { "" };
    let whole = &n / &scale;
    let frac = &n % &scale;
    format!("{sign}{whole}.{frac:0width$}", width = digits as usize)
}
