//! Elementary power series evaluated at p-adic points.
//!
//! Partial sums are taken over the exact digit representative of the argument
//! and stop once every remaining term is provably divisible by `p^T`, where
//! `T` is the argument's absolute precision. Perturbing the argument by
//! `p^T` moves each function by at most `p^T` inside its disk of convergence,
//! so the result is reported to the same absolute precision.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{vp_factorial, PadicApprox, DEFAULT_PRECISION};
use crate::error::{Error, Result};
use crate::prime::Prime;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeriesKind {
    Exp,
    Cosh,
    Sinh,
    /// `log(1 + x)`.
    Log1p,
    /// `(1 + x)^a` for a p-adic integer `a`.
    Binomial(PadicApprox),
}

pub fn series_eval(kind: &SeriesKind, x: &PadicApprox) -> Result<PadicApprox> {
    let p = x.prime();
    let v = x.valuation();
    match kind {
        SeriesKind::Exp | SeriesKind::Cosh | SeriesKind::Sinh => {
            // |x|_p <= 1/p for odd p, |x|_2 <= 1/4
            let min_v = if p.get() == 2 { 2 } else { 1 };
            if !x.is_exact_zero() && v < min_v {
                return Err(Error::Domain(format!(
                    "exponential series needs v_{p}(x) >= {min_v}, got {v}"
                )));
            }
        }
        SeriesKind::Log1p => {
            if !x.is_exact_zero() && v < 1 {
                return Err(Error::Domain(format!("log(1+x) needs |x|_{p} < 1")));
            }
        }
        SeriesKind::Binomial(a) => {
            if a.prime() != p {
                return Err(Error::InvalidParameter("exponent uses a different prime".into()));
            }
            if !x.is_exact_zero() && v < 1 {
                return Err(Error::Domain(format!("(1+x)^a needs |x|_{p} < 1")));
            }
            if !a.is_exact_zero() && a.valuation() < 0 {
                return Err(Error::Domain("(1+x)^a needs a in Z_p".into()));
            }
        }
    }

    if x.is_exact_zero() {
        return Ok(match kind {
            SeriesKind::Sinh | SeriesKind::Log1p => PadicApprox::zero(p),
            _ => PadicApprox::one(p, DEFAULT_PRECISION),
        });
    }
    let mut target = x.absolute_precision().expect("nonzero");
    if let SeriesKind::Binomial(a) = kind {
        match a.absolute_precision() {
            None => return Ok(PadicApprox::one(p, DEFAULT_PRECISION.max(target as u32))),
            Some(t) => target = target.min(t),
        }
    }
    if x.is_zero() {
        // x is only known to vanish mod p^T: every series agrees with its value at 0
        return Ok(match kind {
            SeriesKind::Sinh | SeriesKind::Log1p => PadicApprox::unresolved_zero(p, target),
            _ => PadicApprox::from_rational_abs(&Rational::one(), p, target),
        });
    }

    let xr = x.representative();
    let sum = match kind {
        SeriesKind::Exp => exp_like(&xr, v, target, p, |_| true),
        SeriesKind::Cosh => exp_like(&xr, v, target, p, |m| m % 2 == 0),
        SeriesKind::Sinh => exp_like(&xr, v, target, p, |m| m % 2 == 1),
        SeriesKind::Log1p => log1p_sum(&xr, v, target, p),
        SeriesKind::Binomial(a) => binomial_sum(&a.representative(), &xr, v, target),
    };
    Ok(PadicApprox::from_rational_abs(&sum, p, target))
}

fn exp_like(x: &Rational, v: i64, target: i64, p: Prime, keep: impl Fn(u64) -> bool) -> Rational {
    let pm1 = p.get() as i64 - 1;
    let mut sum = Rational::zero();
    let mut term = Rational::one();
    let mut m: u64 = 0;
    loop {
        if keep(m) {
            sum += &term;
        }
        // v(x^j / j!) >= j v - (j - 1)/(p - 1), increasing in j
        let next = m as i64 + 1;
        if (next * v - target) * pm1 >= next - 1 {
            debug_assert!(next * v - vp_factorial(next as u64, p) as i64 >= target);
            break;
        }
        m += 1;
        term = term * x / rational::int(m as i64);
    }
    sum
}

fn log1p_sum(x: &Rational, v: i64, target: i64, p: Prime) -> Rational {
    let mut sum = Rational::zero();
    let mut pow = x.clone();
    let mut m: u64 = 1;
    loop {
        let term = &pow / rational::int(m as i64);
        if m % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
        let next = m + 1;
        if next as i64 * v - floor_log(next, p) as i64 >= target {
            break;
        }
        m = next;
        pow *= x;
    }
    sum
}

fn binomial_sum(a: &Rational, x: &Rational, v: i64, target: i64) -> Rational {
    let terms = ((target + v - 1) / v).max(1);
    let mut sum = Rational::zero();
    let mut coeff = Rational::one();
    let mut pow = Rational::one();
    for m in 0..terms {
        if m > 0 {
            coeff = coeff * (a - rational::int(m - 1)) / rational::int(m);
            pow *= x;
            if coeff.is_zero() {
                break;
            }
        }
        sum += &coeff * &pow;
    }
    sum
}

fn floor_log(n: u64, p: Prime) -> u32 {
    let mut k = 0;
    let mut q = BigInt::one();
    loop {
        q *= p.get();
        if q > BigInt::from(n) {
            return k;
        }
        k += 1;
    }
}
