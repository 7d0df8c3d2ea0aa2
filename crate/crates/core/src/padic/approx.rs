use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::{vp, Valuation};
use crate::error::{Error, Result};
use crate::prime::Prime;
use crate::rational::{self, Rational};

pub const DEFAULT_PRECISION: u32 = 32;

/// A p-adic number known to finitely many digits.
///
/// Three states are possible:
/// * exact zero (`exact_zero`),
/// * an unresolved zero: `precision == 0`, meaning the value is only known to
///   be `0 mod p^valuation`,
/// * an ordinary value `p^valuation * unit`, with `unit` a p-adic unit known
///   modulo `p^precision`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicApprox {
    prime: Prime,
    valuation: i64,
    unit: BigInt,
    precision: u32,
    exact_zero: bool,
}

impl PadicApprox {
    pub fn zero(prime: Prime) -> Self {
        PadicApprox {
            prime,
            valuation: 0,
            unit: BigInt::zero(),
            precision: 0,
            exact_zero: true,
        }
    }

    /// A value known only to be divisible by `p^absolute_precision`.
    pub fn unresolved_zero(prime: Prime, absolute_precision: i64) -> Self {
        PadicApprox {
            prime,
            valuation: absolute_precision,
            unit: BigInt::zero(),
            precision: 0,
            exact_zero: false,
        }
    }

    pub fn one(prime: Prime, precision: u32) -> Self {
        Self::from_rational(&Rational::one(), prime, precision)
    }

    /// Hensel digit expansion of `x` to `precision` digits past its valuation.
    pub fn from_rational(x: &Rational, prime: Prime, precision: u32) -> Self {
        match vp(x, prime) {
            Valuation::Infinite => Self::zero(prime),
            Valuation::Finite(v) => Self::from_rational_abs(x, prime, v + precision.max(1) as i64),
        }
    }

    pub fn from_int(n: i64, prime: Prime, precision: u32) -> Self {
        Self::from_rational(&rational::int(n), prime, precision)
    }

    /// Reduces an exact rational to a value known modulo `p^absolute_precision`.
    pub(crate) fn from_rational_abs(x: &Rational, prime: Prime, absolute_precision: i64) -> Self {
        let v = match vp(x, prime) {
            Valuation::Infinite => return Self::unresolved_zero(prime, absolute_precision),
            Valuation::Finite(v) if v >= absolute_precision => {
                return Self::unresolved_zero(prime, absolute_precision)
            }
            Valuation::Finite(v) => v,
        };
        let precision = (absolute_precision - v) as u32;
        let unit_part = shift(x, prime, -v);
        let modulus = prime.pow(precision);
        let unit = rational::mod_integer(&unit_part, &modulus)
            .expect("unit part has a p-free denominator");
        PadicApprox {
            prime,
            valuation: v,
            unit,
            precision,
            exact_zero: false,
        }
    }

    /// Builds a value from its valuation and little-endian base-p unit digits.
    pub fn from_digits(prime: Prime, valuation: i64, digits: &[u32]) -> Result<Self> {
        if digits.is_empty() {
            return Ok(Self::unresolved_zero(prime, valuation));
        }
        let mut unit = BigInt::zero();
        for &d in digits.iter().rev() {
            if d as u64 >= prime.get() {
                return Err(Error::DigitRange {
                    digit: d as u64,
                    base: prime.get(),
                });
            }
            unit = unit * prime.get() + d;
        }
        if digits[0] == 0 {
            return Err(Error::Parse("leading unit digit must be nonzero".into()));
        }
        Ok(PadicApprox {
            prime,
            valuation,
            unit,
            precision: digits.len() as u32,
            exact_zero: false,
        })
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    /// Valuation; for an unresolved zero this is the known lower bound.
    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    pub fn exact_valuation(&self) -> Option<Valuation> {
        if self.exact_zero {
            Some(Valuation::Infinite)
        } else if self.precision == 0 {
            None
        } else {
            Some(Valuation::Finite(self.valuation))
        }
    }

    /// Number of known unit digits.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// The value is known modulo `p^absolute_precision`; `None` for exact zero.
    pub fn absolute_precision(&self) -> Option<i64> {
        if self.exact_zero {
            None
        } else {
            Some(self.valuation + self.precision as i64)
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.exact_zero
    }

    /// Zero to the known precision (exact or unresolved).
    pub fn is_zero(&self) -> bool {
        self.exact_zero || self.precision == 0
    }

    pub fn digits(&self) -> Vec<u32> {
        let p = self.prime.get();
        let mut u = self.unit.clone();
        (0..self.precision)
            .map(|_| {
                let (q, r) = u.div_rem(&BigInt::from(p));
                u = q;
                r.to_u32().expect("digit below p")
            })
            .collect()
    }

    /// The rational `p^v * unit`, congruent to the value modulo `p^absolute_precision`.
    pub fn representative(&self) -> Rational {
        if self.is_zero() {
            return Rational::zero();
        }
        shift(&rational::from_big(self.unit.clone()), self.prime, self.valuation)
    }

    pub fn with_precision(&self, precision: u32) -> Self {
        if self.exact_zero || precision >= self.precision {
            return self.clone();
        }
        Self::from_rational_abs(&self.representative(), self.prime, self.valuation + precision as i64)
    }

    fn check_prime(&self, other: &Self) -> Result<()> {
        if self.prime != other.prime {
            return Err(Error::InvalidParameter(format!(
                "mixed primes {} and {}",
                self.prime, other.prime
            )));
        }
        Ok(())
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let modulus = self.prime.pow(self.precision);
        PadicApprox {
            unit: (-&self.unit).mod_floor(&modulus),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        if self.exact_zero {
            return Ok(other.clone());
        }
        if other.exact_zero {
            return Ok(self.clone());
        }
        let abs_prec = self
            .absolute_precision()
            .unwrap()
            .min(other.absolute_precision().unwrap());
        let sum = self.representative() + other.representative();
        Ok(Self::from_rational_abs(&sum, self.prime, abs_prec))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        if self.exact_zero || other.exact_zero {
            return Ok(Self::zero(self.prime));
        }
        if self.precision == 0 || other.precision == 0 {
            // for an unresolved zero `valuation` is its known bound
            return Ok(Self::unresolved_zero(self.prime, self.valuation + other.valuation));
        }
        let precision = self.precision.min(other.precision);
        let modulus = self.prime.pow(precision);
        Ok(PadicApprox {
            prime: self.prime,
            valuation: self.valuation + other.valuation,
            unit: (&self.unit * &other.unit).mod_floor(&modulus),
            precision,
            exact_zero: false,
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        if other.is_zero() {
            return Err(Error::Domain("division by a value indistinguishable from zero".into()));
        }
        if self.exact_zero {
            return Ok(Self::zero(self.prime));
        }
        if self.precision == 0 {
            return Ok(Self::unresolved_zero(self.prime, self.valuation - other.valuation));
        }
        let precision = self.precision.min(other.precision);
        let modulus = self.prime.pow(precision);
        let inv = rational::mod_inverse(&other.unit, &modulus).expect("units are invertible");
        Ok(PadicApprox {
            prime: self.prime,
            valuation: self.valuation - other.valuation,
            unit: (&self.unit * inv).mod_floor(&modulus),
            precision,
            exact_zero: false,
        })
    }

    pub fn pow(&self, mut e: u64) -> Result<Self> {
        let mut base = self.clone();
        let mut acc = Self::one(self.prime, self.precision.max(1));
        if self.exact_zero {
            return Ok(if e == 0 { acc } else { Self::zero(self.prime) });
        }
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// True when the difference is zero to the shared precision.
    pub fn agrees_with(&self, other: &Self) -> Result<bool> {
        Ok(self.sub(other)?.is_zero())
    }
}

/// `x * p^e` for any integer `e`.
pub(crate) fn shift(x: &Rational, prime: Prime, e: i64) -> Rational {
    let pe = prime.pow(e.unsigned_abs() as u32);
    if e >= 0 {
        x * rational::from_big(pe)
    } else {
        x / rational::from_big(pe)
    }
}

impl fmt::Display for PadicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact_zero {
            return write!(f, "0 base {}", self.prime);
        }
        let digits: Vec<String> = self.digits().iter().map(|d| d.to_string()).collect();
        write!(
            f,
            "p^{} * ({}) base {} prec {}",
            self.valuation,
            digits.join(","),
            self.prime,
            self.precision
        )
    }
}

impl FromStr for PadicApprox {
    type Err = Error;

    /// Parses `p^<v> * (d0,...,d{N-1}) base <p> prec <N>` or `0 base <p>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("not a p-adic text form: {s:?}"));
        let t = s.trim();
        if let Some(rest) = t.strip_prefix("0 base ") {
            let prime: Prime = rest.trim().parse()?;
            return Ok(Self::zero(prime));
        }
        let rest = t.strip_prefix("p^").ok_or_else(bad)?;
        let (v, rest) = rest.split_once('*').ok_or_else(bad)?;
        let valuation: i64 = v.trim().parse().map_err(|_| bad())?;
        let rest = rest.trim().strip_prefix('(').ok_or_else(bad)?;
        let (digits, rest) = rest.split_once(')').ok_or_else(bad)?;
        let rest = rest.trim().strip_prefix("base").ok_or_else(bad)?;
        let (p, n) = rest.trim().split_once("prec").ok_or_else(bad)?;
        let prime: Prime = p.trim().parse()?;
        let precision: u32 = n.trim().parse().map_err(|_| bad())?;
        let digits: Vec<u32> = if digits.trim().is_empty() {
            Vec::new()
        } else {
            digits
                .split(',')
                .map(|d| d.trim().parse::<u32>().map_err(|_| bad()))
                .collect::<Result<_>>()?
        };
        if digits.len() as u32 != precision {
            return Err(Error::Parse(format!(
                "precision {precision} does not match {} digits",
                digits.len()
            )));
        }
        Self::from_digits(prime, valuation, &digits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use proptest::prelude::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn hensel_digits_of_one_half() {
        // 1/2 mod 81 = 41 = 2 + 1*3 + 1*9 + 1*27
        let x = PadicApprox::from_rational(&frac(1, 2), p(3), 4);
        assert_eq!(x.valuation(), 0);
        assert_eq!(x.digits(), vec![2, 1, 1, 1]);
    }

    #[test]
    fn nine_in_base_three() {
        let x = PadicApprox::from_rational(&int(9), p(3), 3);
        assert_eq!(x.valuation(), 2);
        assert_eq!(x.digits(), vec![1, 0, 0]);
        assert!(PadicApprox::from_rational(&int(0), p(5), 8).is_exact_zero());
    }

    #[test]
    fn negative_valuation_from_denominator() {
        let x = PadicApprox::from_rational(&frac(5, 16), p(2), 6);
        assert_eq!(x.valuation(), -4);
        assert_eq!(x.digits(), vec![1, 0, 1, 0, 0, 0]);
    }

    #[test]
    fn text_form_round_trip() {
        let x = PadicApprox::from_rational(&frac(-171, 1024), p(3), 6);
        let s = x.to_string();
        assert_eq!(s, format!("p^2 * ({}) base 3 prec 6", x.digits().iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")));
        assert_eq!(s.parse::<PadicApprox>().unwrap(), x);
        assert_eq!("0 base 7".parse::<PadicApprox>().unwrap(), PadicApprox::zero(p(7)));
        assert!("p^0 * (3) base 3 prec 1".parse::<PadicApprox>().is_err());
        assert!("p^0 * (1,2) base 3 prec 3".parse::<PadicApprox>().is_err());
    }

    #[test]
    fn cancellation_leaves_unresolved_zero() {
        let a = PadicApprox::from_rational(&frac(1, 2), p(3), 5);
        let b = PadicApprox::from_rational(&(frac(1, 2) + int(243 * 7)), p(3), 8);
        let d = a.sub(&b).unwrap();
        assert!(d.is_zero() && !d.is_exact_zero());
        assert_eq!(d.absolute_precision(), Some(5));
        assert!(a.agrees_with(&b).unwrap());
    }

    #[test]
    fn division_tracks_precision() {
        let a = PadicApprox::from_rational(&int(6), p(3), 5);
        let b = PadicApprox::from_rational(&int(9), p(3), 3);
        let q = a.div(&b).unwrap();
        assert_eq!(q.valuation(), -1);
        assert_eq!(q.precision(), 3);
        assert_eq!(q.representative(), frac(2, 3));
        assert!(a.div(&PadicApprox::zero(p(3))).is_err());
    }

    fn rational_strategy() -> impl Strategy<Value = Rational> {
        (-100_000i64..100_000, 1i64..100_000).prop_map(|(n, d)| frac(n, d))
    }

    proptest! {
        #[test]
        fn round_trip_modulo_precision(x in rational_strategy(), n in 1u32..20, idx in 0usize..4) {
            let pr = p([2, 3, 5, 7][idx]);
            let a = PadicApprox::from_rational(&x, pr, n);
            if x.is_zero() {
                prop_assert!(a.is_exact_zero());
            } else {
                let back = a.representative();
                let diff = &x - &back;
                prop_assert!(vp(&diff, pr).at_least(a.valuation() + n as i64));
                prop_assert_ne!(a.digits()[0], 0);
            }
        }

        #[test]
        fn arithmetic_matches_exact(x in rational_strategy(), y in rational_strategy()) {
            let pr = p(5);
            let (a, b) = (PadicApprox::from_rational(&x, pr, 12), PadicApprox::from_rational(&y, pr, 12));
            let sum = a.add(&b).unwrap();
            prop_assert!(PadicApprox::from_rational(&(&x + &y), pr, 40).agrees_with(&sum).unwrap());
            let prod = a.mul(&b).unwrap();
            prop_assert!(PadicApprox::from_rational(&(&x * &y), pr, 40).agrees_with(&prod).unwrap());
        }
    }
}
