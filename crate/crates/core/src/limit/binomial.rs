use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::padic::{PadicApprox, DEFAULT_PRECISION};
use crate::prime::Prime;
use crate::rational::{self, Rational};

pub fn binom(n: u64, r: u64) -> Result<BigUint> {
    if r > n {
        return Err(Error::Range(format!("C({n}, {r}) needs r <= n")));
    }
    let r = r.min(n - r);
    let mut c = BigUint::one();
    for i in 0..r {
        c = c * (n - i) / (i + 1);
    }
    Ok(c)
}

/// v_p(C(n, r)) as the number of carries when adding `r` and `n - r` in base p.
pub fn binom_vp(n: u64, r: u64, p: Prime) -> Result<u64> {
    if r > n {
        return Err(Error::Range(format!("C({n}, {r}) needs r <= n")));
    }
    let p = p.get();
    let (mut a, mut b, mut carry, mut carries) = (r, n - r, 0, 0);
    while a > 0 || b > 0 || carry > 0 {
        let s = a % p + b % p + carry;
        carry = u64::from(s >= p);
        carries += carry;
        a /= p;
        b /= p;
    }
    Ok(carries)
}

/// The generalized binomial coefficient `a(a-1)...(a-m+1)/m!` at a rational point.
pub fn binom_rational(a: &Rational, m: u64) -> Rational {
    let mut c = Rational::one();
    for i in 0..m {
        c = c * (a - rational::int(i as i64)) / rational::int(i as i64 + 1);
        if c.is_zero() {
            break;
        }
    }
    c
}

/// `C(a, m)` for a p-adic integer `a`, with the precision lost to the division
/// by `m!` tracked through the arithmetic.
pub fn padic_binomial(a: &PadicApprox, m: u64) -> Result<PadicApprox> {
    let p = a.prime();
    if !a.is_exact_zero() && a.valuation() < 0 {
        return Err(Error::Domain(format!("C(a, m) needs a in Z_{p}")));
    }
    let mut num = PadicApprox::one(p, a.precision().max(DEFAULT_PRECISION));
    for i in 0..m {
        let factor = a.sub(&PadicApprox::from_int(i as i64, p, DEFAULT_PRECISION.max(a.precision())))?;
        num = num.mul(&factor)?;
    }
    let fact = (1..=m).fold(BigUint::one(), |f, i| f * i);
    let fact = PadicApprox::from_rational(&rational::from_biguint(fact), p, num.precision().max(1));
    let c = num.div(&fact)?;
    if let Some(t) = c.absolute_precision() {
        if t < 1 {
            return Err(Error::PrecisionExhausted(format!(
                "C(a, {m}) is not determined modulo {p}: a needs more digits"
            )));
        }
    }
    debug_assert!(c.is_zero() || c.valuation() >= 0);
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::vp_int;
    use crate::rational::{frac, int};

    fn pr(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn small_values() {
        assert_eq!(binom(5, 2).unwrap(), BigUint::from(10u32));
        assert_eq!(binom(7, 0).unwrap(), BigUint::one());
        assert!(matches!(binom(2, 3), Err(Error::Range(_))));
        assert_eq!(binom_vp(11, 4, pr(3)).unwrap(), 1);
    }

    #[test]
    fn kummer_matches_factorization() {
        for p in [2, 3, 5, 7] {
            for n in 0..=200u64 {
                for r in 0..=n {
                    let direct = vp_int(&binom(n, r).unwrap().into(), pr(p)).unwrap();
                    assert_eq!(binom_vp(n, r, pr(p)).unwrap(), direct, "C({n},{r}) p={p}");
                }
            }
        }
    }

    #[test]
    fn generalized_binomials() {
        for m in 0..10u64 {
            let sign = if m % 2 == 0 { 1 } else { -1 };
            assert_eq!(binom_rational(&int(-1), m), int(sign));
        }
        assert_eq!(binom_rational(&frac(1, 2), 2), frac(-1, 8));
        assert_eq!(binom_rational(&int(2), 5), int(0));
    }

    #[test]
    fn padic_binomials() {
        let p = pr(3);
        let minus_one = PadicApprox::from_int(-1, p, 20);
        for m in 0..8u64 {
            let c = padic_binomial(&minus_one, m).unwrap();
            let expected = PadicApprox::from_int(if m % 2 == 0 { 1 } else { -1 }, p, 30);
            assert!(c.agrees_with(&expected).unwrap(), "m = {m}");
            assert!(c.absolute_precision().unwrap() >= 20 - crate::padic::vp_factorial(m, p) as i64);
        }
        assert!(padic_binomial(&PadicApprox::from_int(5, p, 4), 0).unwrap().agrees_with(&PadicApprox::one(p, 8)).unwrap());
        let two = PadicApprox::from_int(2, p, 10);
        assert!(padic_binomial(&two, 5).unwrap().is_zero());
        // one digit of a cannot survive the division by 9!
        let short = PadicApprox::from_int(7, p, 1);
        assert!(matches!(padic_binomial(&short, 9), Err(Error::PrecisionExhausted(_))));
        assert!(padic_binomial(&PadicApprox::from_rational(&frac(1, 3), p, 5), 2).is_err());
    }
}
