//! Exact rational arithmetic for discrepancies and thresholds.

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

pub fn ratio(numer: i128, denom: i128) -> Rational {
    Rational::new(numer, denom)
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

/// Compares an exact rational against a floating-point threshold.
pub fn le_f64(r: &Rational, bound: f64) -> bool {
    to_f64(r) <= bound
}

/// Parses `"3/8"`, `"0.125"`, `"1e-2"` or `"2"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("cannot parse {s:?} as a rational number"));
    if let Some((p, q)) = s.split_once('/') {
        let p: i128 = p.trim().parse().map_err(|_| bad())?;
        let q: i128 = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: i128 = digits.parse().map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    if scale.unsigned_abs() > 30 {
        return Err(bad());
    }
    let pow = 10i128.pow(scale.unsigned_abs());
    let mut r = if scale >= 0 {
        Rational::from_integer(numer * pow)
    } else {
        Rational::new(numer, pow)
    };
    if negative {
        r = -r;
    }
    Ok(r)
}

/// Serializes rationals as JSON numbers.
pub mod as_f64 {
    use super::{to_f64, Rational};
    use serde::Serializer;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(to_f64(r))
    }
}

pub mod vec_as_f64 {
    use super::{to_f64, Rational};
    use serde::ser::SerializeSeq;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&to_f64(r))?;
        }
        seq.end()
    }
}
