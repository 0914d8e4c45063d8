//! Exact rational scalars.
//!
//! Every value, level and homotopy parameter in the crate is an arbitrary
//! precision rational in canonical form, so equality tests are exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Scalar {
    Scalar::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

pub fn half() -> Scalar {
    ratio(1, 2)
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"-0.125"`.
pub fn parse(text: &str) -> Result<Scalar, Error> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not an exact rational: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Scalar::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{whole}{frac}");
    let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let v = Scalar::new(num, den);
    Ok(if neg { -v } else { v })
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format(x: &Scalar) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn abs(x: &Scalar) -> Scalar {
    x.abs()
}

pub fn midpoint(a: &Scalar, b: &Scalar) -> Scalar {
    (a + b) / int(2)
}

/// Linear interpolation `(1-s) a + s b`.
pub fn lerp(a: &Scalar, b: &Scalar, s: &Scalar) -> Scalar {
    a + (b - a) * s
}

/// Closest rational with denominator `den` to a float. Only used by instance
/// generators; nothing downstream sees a float.
pub fn from_f64_rounded(x: f64, den: i64) -> Scalar {
    ratio((x * den as f64).round() as i64, den)
}

/// Serde adapter storing a scalar as its canonical string.
pub mod serde_str {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Scalar, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(x))
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Text(String),
        Int(i64),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Scalar, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Text(t) => parse(&t).map_err(de::Error::custom),
            Raw::Int(i) => Ok(int(i)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse("-0.125").unwrap(), ratio(-1, 8));
        assert_eq!(parse(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse("7").unwrap(), int(7));
        assert_eq!(parse("2/-4").unwrap(), ratio(-1, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse("1e3").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn canonical_format() {
        assert_eq!(format(&ratio(4, 8)), "1/2");
        assert_eq!(format(&ratio(-6, 3)), "-2");
        assert_eq!(format(&ratio(3, -9)), "-1/3");
    }

    proptest::proptest! {
        #[test]
        fn add_sub_has_no_drift(a in -10_000i64..10_000, b in 1i64..997, c in -10_000i64..10_000, d in 1i64..991) {
            let x = ratio(a, b);
            let y = ratio(c, d);
            proptest::prop_assert_eq!(&(&x + &y) - &y, x.clone());
            proptest::prop_assert_eq!(parse(&format(&x)).unwrap(), x);
        }
    }
}
