//! Exact rationals and their text forms.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn from_big(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

pub fn from_biguint(n: BigUint) -> Rational {
    Rational::from_integer(BigInt::from_biguint(Sign::Plus, n))
}

/// Parses `[+-]digits[/digits]`, e.g. `-171/1024`. Surrounding whitespace is ignored.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (sign, body) = match t.as_bytes().first() {
        Some(b'-') => (-1, &t[1..]),
        Some(b'+') => (1, &t[1..]),
        _ => (1, t),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (body, None),
    };
    let digits = |x: &str| -> Result<BigInt> {
        if x.is_empty() || !x.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        x.parse::<BigInt>().map_err(|_| bad())
    };
    let n = digits(num)? * sign;
    let d = match den {
        Some(d) => digits(d)?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(n, d))
}

/// Always `num/den`, even for integers.
pub fn to_fraction_string(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Natural-number text for integers, `num/den` otherwise.
pub fn to_text(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        to_fraction_string(x)
    }
}

/// Reduces `x` modulo `modulus` when the denominator is invertible, giving the
/// canonical representative in `[0, modulus)`.
pub fn mod_integer(x: &Rational, modulus: &BigInt) -> Option<BigInt> {
    let inv = mod_inverse(x.denom(), modulus)?;
    Some((x.numer() * inv).mod_floor(modulus))
}

pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let g = a.mod_floor(m).extended_gcd(m);
    if !g.gcd.is_one() {
        return None;
    }
    Some(g.x.mod_floor(m))
}

pub fn abs(x: &Rational) -> Rational {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_text_forms() {
        assert_eq!(parse_rational("-171/1024").unwrap(), frac(-171, 1024));
        assert_eq!(parse_rational(" 12 ").unwrap(), int(12));
        assert_eq!(parse_rational("+6/4").unwrap(), frac(3, 2));
        assert_eq!(parse_rational("0/7").unwrap(), int(0));
        for bad in ["", "-", "1/", "/2", "1/0", "1.5", "a", "1/-2", "--1"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn formats() {
        assert_eq!(to_fraction_string(&int(5)), "5/1");
        assert_eq!(to_text(&frac(-3, 16)), "-3/16");
        assert_eq!(to_text(&int(-2)), "-2");
    }

    #[test]
    fn modular_reduction() {
        // 1/2 mod 81 = 41
        assert_eq!(mod_integer(&frac(1, 2), &BigInt::from(81)), Some(BigInt::from(41)));
        assert_eq!(mod_integer(&int(-1), &BigInt::from(27)), Some(BigInt::from(26)));
        assert_eq!(mod_integer(&frac(1, 3), &BigInt::from(9)), None);
    }
}
