//! Exact rational weights.
//!
//! Stencil weights of every operator are rationals with small denominators
//! (1/2, 1/4, 1/m, and the decimal smoothing parameters), so compositions of
//! a handful of operators stay well inside `i128`.

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

pub fn rat(n: i128, d: i128) -> Rational {
    Ratio::new(n, d)
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parses `3`, `-0.45`, `1/4` or `2.5e-1` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::InvalidParameter(format!("not a number: `{text}`"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return Err(Error::InvalidParameter(format!("zero denominator in `{text}`")));
        }
        return Ok(n / d);
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(p) => (&t[..p], t[p + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    if int_part.len() + frac_part.len() > 30 || exponent.abs() > 30 {
        return Err(Error::InvalidParameter(format!("too many digits in `{text}`")));
    }
    let mut numer: i128 = 0;
    for c in int_part.chars().chain(frac_part.chars()) {
        numer = numer * 10 + (c as u8 - b'0') as i128;
    }
    let scale = exponent - frac_part.len() as i32;
    let mut value = Rational::from_integer(numer);
    let ten = Rational::from_integer(10);
    for _ in 0..scale.unsigned_abs() {
        value = if scale > 0 { value * ten } else { value / ten };
    }
    Ok(if neg { -value } else { value })
}

pub fn format_rational(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `2^e` for a possibly negative exponent.
pub fn pow2(e: i32) -> Rational {
    if e >= 0 {
        Rational::from_integer(1i128 << e)
    } else {
        rat(1, 1i128 << (-e))
    }
}

/// Serialisation of exact values as `"p/q"` strings, for use with
/// `#[serde(serialize_with = "exact::ser")]`.
pub mod exact {
    use super::{format_rational, Rational};
    use serde::ser::{Serialize, Serializer};

    pub trait Exact {
        fn exact(&self) -> serde_json::Value;
    }

    impl Exact for Rational {
        fn exact(&self) -> serde_json::Value {
            serde_json::Value::String(format_rational(self))
        }
    }

    impl Exact for i64 {
        fn exact(&self) -> serde_json::Value {
            serde_json::json!(self)
        }
    }

    impl<T: Exact> Exact for [T; 2] {
        fn exact(&self) -> serde_json::Value {
            serde_json::Value::Array(self.iter().map(Exact::exact).collect())
        }
    }

    impl<T: Exact> Exact for Vec<T> {
        fn exact(&self) -> serde_json::Value {
            serde_json::Value::Array(self.iter().map(Exact::exact).collect())
        }
    }

    impl<A: Exact, B: Exact> Exact for (A, B) {
        fn exact(&self) -> serde_json::Value {
            serde_json::Value::Array(vec![self.0.exact(), self.1.exact()])
        }
    }

    pub fn ser<T: Exact, S: Serializer>(value: &T, s: S) -> Result<S::Ok, S::Error> {
        value.exact().serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse_rational("0.45").unwrap(), rat(9, 20));
        assert_eq!(parse_rational("1/4").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-2.5e-1").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("3").unwrap(), rat(3, 1));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn powers_of_two() {
        assert_eq!(pow2(-3), rat(1, 8));
        assert_eq!(pow2(2), rat(4, 1));
        assert_eq!(format_rational(&rat(3, 8)), "3/8");
        assert_eq!(format_rational(&rat(2, 1)), "2");
    }
}
