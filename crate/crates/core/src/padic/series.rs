use std::fmt;

use num_traits::{One, Zero};

use super::PadicApprox;
use crate::error::{Error, Result};
use crate::prime::Prime;
use crate::rational::{self, Rational};

/// A power series over the rationals truncated after `z^order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalSeries {
    coeffs: Vec<Rational>,
}

impl FormalSeries {
    /// Coefficients `c_0..c_D`; the order is `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Order("a series needs at least a constant term".into()));
        }
        Ok(FormalSeries { coeffs })
    }

    pub fn zero(order: usize) -> Self {
        FormalSeries {
            coeffs: vec![Rational::zero(); order + 1],
        }
    }

    pub fn constant(c: Rational, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Rational::one(), order)
    }

    /// The series `z`.
    pub fn variable(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = Rational::one();
        }
        s
    }

    pub fn exp(order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut c = Rational::one();
        for k in 0..=order {
            if k > 0 {
                c /= rational::int(k as i64);
            }
            coeffs.push(c.clone());
        }
        FormalSeries { coeffs }
    }

    /// `e^z - 1`.
    pub fn exp_minus_one(order: usize) -> Self {
        let mut s = Self::exp(order);
        s.coeffs[0] = Rational::zero();
        s
    }

    pub fn cosh(order: usize) -> Self {
        let mut s = Self::exp(order);
        for (k, c) in s.coeffs.iter_mut().enumerate() {
            if k % 2 == 1 {
                *c = Rational::zero();
            }
        }
        s
    }

    pub fn sinh(order: usize) -> Self {
        let mut s = Self::exp(order);
        for (k, c) in s.coeffs.iter_mut().enumerate() {
            if k % 2 == 0 {
                *c = Rational::zero();
            }
        }
        s
    }

    /// `log(1 + z)`.
    pub fn log1p(order: usize) -> Self {
        let coeffs = (0..=order)
            .map(|k| match k {
                0 => Rational::zero(),
                k if k % 2 == 1 => rational::frac(1, k as i64),
                k => rational::frac(-1, k as i64),
            })
            .collect();
        FormalSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, Rational::zero());
        FormalSeries { coeffs }
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::Order(format!(
                "orders {} and {} differ",
                self.order(),
                other.order()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(FormalSeries {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(FormalSeries {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        FormalSeries {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// `f(c z)`.
    pub fn scale_argument(&self, c: &Rational) -> Self {
        let mut pow = Rational::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| {
                let out = a * &pow;
                pow *= c;
                out
            })
            .collect();
        FormalSeries { coeffs }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let d = self.order();
        let mut out = vec![Rational::zero(); d + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=d - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        FormalSeries { coeffs: out }
    }

    /// `self(inner(z))`; the inner series must have zero constant term.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        self.check_order(inner)?;
        if !inner.coeffs[0].is_zero() {
            return Err(Error::Domain(
                "composition needs an inner series with zero constant term".into(),
            ));
        }
        let d = self.order();
        let mut acc = Self::constant(self.coeffs[d].clone(), d);
        for c in self.coeffs[..d].iter().rev() {
            acc = acc.mul_unchecked(inner);
            acc.coeffs[0] += c;
        }
        Ok(acc)
    }

    pub fn integer_power(&self, mut n: u64) -> Self {
        let mut acc = Self::one(self.order());
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    /// `(1 + u)^a = sum_m C(a, m) u^m` for a series with constant term 1.
    pub fn rational_power(&self, a: &Rational) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::Domain(
                "a non-integer power needs a series with constant term 1".into(),
            ));
        }
        let d = self.order();
        let mut u = self.clone();
        u.coeffs[0] = Rational::zero();
        let mut out = Self::one(d);
        let mut u_pow = Self::one(d);
        let mut binom = Rational::one();
        for m in 1..=d {
            binom = binom * (a - rational::int(m as i64 - 1)) / rational::int(m as i64);
            u_pow = u_pow.mul_unchecked(&u);
            if binom.is_zero() {
                break;
            }
            for (o, c) in out.coeffs.iter_mut().zip(&u_pow.coeffs) {
                if !c.is_zero() {
                    *o += &binom * c;
                }
            }
        }
        Ok(out)
    }

    /// Power with a p-adic integer exponent, evaluated at the exponent's digit
    /// representative. Coefficient of `z^k` agrees with the true one modulo
    /// the exponent's absolute precision less `v_p(k!)` and the binomial losses.
    pub fn padic_power(&self, a: &PadicApprox) -> Result<Self> {
        if !a.is_exact_zero() && a.valuation() < 0 {
            return Err(Error::Domain("exponent must be a p-adic integer".into()));
        }
        self.rational_power(&a.representative())
    }

    /// Exact value at a rational point (finite sum of the truncation).
    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// Minimum p-adic valuation over the nonzero coefficients.
    pub fn min_valuation(&self, p: Prime) -> super::Valuation {
        self.coeffs
            .iter()
            .map(|c| super::vp(c, p))
            .min()
            .unwrap_or(super::Valuation::Infinite)
    }
}

impl fmt::Display for FormalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(rational::to_text).collect();
        write!(f, "[{}] + O(z^{})", parts.join(", "), self.order() + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn exp_minus_one_composed_with_z() {
        let s = FormalSeries::exp_minus_one(6).compose(&FormalSeries::variable(6)).unwrap();
        assert_eq!(s.coeff(2), frac(1, 2));
        assert_eq!(s.coeff(3), frac(1, 6));
    }

    #[test]
    fn cosh_power_fourth_coefficient() {
        // (cosh(z / sqrt 2))^2 keeps only even powers: z^{2k} / (2^k (2k)!)
        let half = frac(1, 2);
        let mut c = FormalSeries::cosh(4);
        for k in (0..=4).step_by(2) {
            let base = c.coeff(k);
            let scaled = base * num_traits::pow(half.clone(), k / 2);
            c.coeffs[k] = scaled;
        }
        let sq = c.integer_power(2);
        // (3n - 2) / (24 n) at n = 2
        assert_eq!(sq.coeff(4), frac(1, 12));
        assert_eq!(sq.coeff(2), frac(1, 2));
    }

    #[test]
    fn multiply_by_one() {
        let s = FormalSeries::log1p(8);
        assert_eq!(s.mul(&FormalSeries::one(8)).unwrap(), s);
    }

    #[test]
    fn mismatched_orders() {
        let a = FormalSeries::exp(4);
        let b = FormalSeries::exp(5);
        assert!(matches!(a.add(&b), Err(Error::Order(_))));
        assert!(matches!(a.mul(&b), Err(Error::Order(_))));
        assert!(matches!(a.compose(&b), Err(Error::Order(_))));
    }

    #[test]
    fn composition_needs_zero_constant() {
        let a = FormalSeries::exp(4);
        assert!(a.compose(&FormalSeries::exp(4)).is_err());
    }

    #[test]
    fn hyperbolic_identity() {
        let d = 24;
        let c = FormalSeries::cosh(d);
        let s = FormalSeries::sinh(d);
        let lhs = c.mul(&c).unwrap().sub(&s.mul(&s).unwrap()).unwrap();
        assert_eq!(lhs, FormalSeries::one(d));
    }

    #[test]
    fn log_inverts_exp() {
        let d = 20;
        let back = FormalSeries::log1p(d)
            .compose(&FormalSeries::exp_minus_one(d))
            .unwrap();
        assert_eq!(back, FormalSeries::variable(d));
    }

    #[test]
    fn rational_power_agrees_with_integer_power() {
        let base = FormalSeries::exp(10);
        for n in 0..6u64 {
            assert_eq!(
                base.rational_power(&int(n as i64)).unwrap(),
                base.integer_power(n)
            );
        }
        // (1+z)^{-1} = 1 - z + z^2 - ...
        let inv = FormalSeries::one(6)
            .add(&FormalSeries::variable(6))
            .unwrap()
            .rational_power(&int(-1))
            .unwrap();
        for k in 0..=6 {
            assert_eq!(inv.coeff(k), int(if k % 2 == 0 { 1 } else { -1 }));
        }
    }
}
