//! p-adic valuation, absolute value, balls and spheres, finite-precision
//! p-adic numbers, and truncated formal power series.

mod approx;
mod elementary;
mod series;

use std::cmp::Ordering;
use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use crate::prime::Prime;
use crate::rational::{self, Rational};

pub use approx::{PadicApprox, DEFAULT_PRECISION};
pub use elementary::{series_eval, SeriesKind};
pub use series::FormalSeries;

/// A p-adic valuation, with `Infinite` for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    /// True when the valuation is at least `n` (always true for infinity).
    pub fn at_least(self, n: i64) -> bool {
        match self {
            Valuation::Finite(v) => v >= n,
            Valuation::Infinite => true,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_i64(*v),
            Valuation::Infinite => s.serialize_str("inf"),
        }
    }
}

impl std::str::FromStr for Valuation {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s.trim() {
            "inf" | "+inf" | "infinity" => Ok(Valuation::Infinite),
            t => t
                .parse()
                .map(Valuation::Finite)
                .map_err(|_| crate::Error::Parse(format!("not a valuation: {s:?}"))),
        }
    }
}

/// Exponent of `p` in a nonzero integer.
pub fn vp_int(n: &BigInt, p: Prime) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let pb = p.to_bigint();
    let mut m = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

pub fn vp_u64(mut n: u64, p: Prime) -> Option<u64> {
    if n == 0 {
        return None;
    }
    let mut v = 0;
    while n % p.get() == 0 {
        n /= p.get();
        v += 1;
    }
    Some(v)
}

pub fn vp(x: &Rational, p: Prime) -> Valuation {
    match vp_int(x.numer(), p) {
        None => Valuation::Infinite,
        Some(vn) => {
            let vd = vp_int(x.denom(), p).expect("denominator is positive");
            Valuation::Finite(vn as i64 - vd as i64)
        }
    }
}

/// Base-p digit sum of `n`.
pub fn digit_sum(mut n: u64, p: Prime) -> u64 {
    let mut s = 0;
    while n > 0 {
        s += n % p.get();
        n /= p.get();
    }
    s
}

/// Legendre: v_p(m!) = (m - s_p(m)) / (p - 1).
pub fn vp_factorial(m: u64, p: Prime) -> u64 {
    (m - digit_sum(m, p)) / (p.get() - 1)
}

/// The p-adic absolute value `p^exponent`; a `None` exponent encodes |0|_p = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadicAbs {
    prime: Prime,
    exponent: Option<i64>,
}

impl PadicAbs {
    pub fn from_valuation(v: Valuation, prime: Prime) -> Self {
        PadicAbs {
            prime,
            exponent: v.finite().map(|v| -v),
        }
    }

    pub fn one(prime: Prime) -> Self {
        PadicAbs {
            prime,
            exponent: Some(0),
        }
    }

    pub fn zero(prime: Prime) -> Self {
        PadicAbs {
            prime,
            exponent: None,
        }
    }

    /// `p^exponent`.
    pub fn power(prime: Prime, exponent: i64) -> Self {
        PadicAbs {
            prime,
            exponent: Some(exponent),
        }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn exponent(&self) -> Option<i64> {
        self.exponent
    }

    pub fn valuation(&self) -> Valuation {
        match self.exponent {
            Some(e) => Valuation::Finite(-e),
            None => Valuation::Infinite,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.exponent.is_none()
    }

    pub fn to_rational(&self) -> Rational {
        match self.exponent {
            None => Rational::zero(),
            Some(e) if e >= 0 => rational::from_big(self.prime.pow(e as u32)),
            Some(e) => Rational::new(1.into(), self.prime.pow((-e) as u32)),
        }
    }
}

impl PartialOrd for PadicAbs {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.prime != other.prime {
            return None;
        }
        // None (zero) sorts below every power.
        Some(self.exponent.cmp(&other.exponent))
    }
}

impl Mul for PadicAbs {
    type Output = PadicAbs;
    fn mul(self, rhs: PadicAbs) -> PadicAbs {
        assert_eq!(self.prime, rhs.prime, "absolute values for different primes");
        PadicAbs {
            prime: self.prime,
            exponent: match (self.exponent, rhs.exponent) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            },
        }
    }
}

impl fmt::Display for PadicAbs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&rational::to_text(&self.to_rational()))
    }
}

pub fn abs_p(x: &Rational, p: Prime) -> PadicAbs {
    PadicAbs::from_valuation(vp(x, p), p)
}

pub fn dist_p(x: &Rational, y: &Rational, p: Prime) -> PadicAbs {
    abs_p(&(x - y), p)
}

/// The closed ball `{x : |x - center|_p <= p^-depth}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ball {
    pub prime: Prime,
    pub center: Rational,
    pub depth: i64,
}

impl Ball {
    pub fn new(center: Rational, depth: i64, prime: Prime) -> Self {
        Ball {
            prime,
            center,
            depth,
        }
    }

    pub fn radius(&self) -> PadicAbs {
        PadicAbs::power(self.prime, -self.depth)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        vp(&(x - &self.center), self.prime).at_least(self.depth)
    }

    /// Membership of an approximate point, `None` when its precision is too low to decide.
    pub fn contains_approx(&self, x: &PadicApprox) -> Option<bool> {
        let diff = x.representative() - &self.center;
        let known = match x.absolute_precision() {
            None => return Some(self.contains(&x.representative())),
            Some(a) => a,
        };
        match vp(&diff, self.prime) {
            Valuation::Finite(w) if w < known => Some(w >= self.depth),
            _ if known >= self.depth => Some(true),
            _ => None,
        }
    }
}

/// `{x : |x - center|_p = p^-depth}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sphere {
    pub prime: Prime,
    pub center: Rational,
    pub depth: i64,
}

impl Sphere {
    pub fn new(center: Rational, depth: i64, prime: Prime) -> Self {
        Sphere {
            prime,
            center,
            depth,
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        vp(&(x - &self.center), self.prime) == Valuation::Finite(self.depth)
    }
}

pub fn in_ball(x: &Rational, b: &Ball) -> bool {
    b.contains(x)
}

pub fn in_sphere(x: &Rational, s: &Sphere) -> bool {
    s.contains(x)
}
