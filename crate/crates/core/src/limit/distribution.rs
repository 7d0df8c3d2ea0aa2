use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::padic::{vp, vp_u64, Valuation};
use crate::prime::Prime;
use crate::rational::{self, Rational};

/// ξ = 0 with probability q and 1 with probability q' = 1 - q, both in Z_p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BernoulliParams {
    prime: Prime,
    q: Rational,
}

impl BernoulliParams {
    pub fn new(prime: Prime, q: Rational) -> Result<Self> {
        let q_prime = Rational::one() - &q;
        if !vp(&q, prime).at_least(0) || !vp(&q_prime, prime).at_least(0) {
            return Err(Error::InvalidParameter(format!(
                "q = {} and 1 - q must both be {prime}-adic integers",
                rational::to_text(&q)
            )));
        }
        Ok(BernoulliParams { prime, q })
    }

    /// q = 1/2; needs an odd prime.
    pub fn symmetric(prime: Prime) -> Result<Self> {
        Self::new(prime, rational::frac(1, 2))
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn q_prime(&self) -> Rational {
        Rational::one() - &self.q
    }

    /// Integers `(a, b - a, b)` with `q = a/b`, `q' = (b - a)/b`.
    fn integer_parts(&self) -> (BigInt, BigInt, BigInt) {
        let a = self.q.numer().clone();
        let b = self.q.denom().clone();
        let c = &b - &a;
        (a, c, b)
    }
}

/// How a sum `S` is tested against `r` at depth `l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// `v_p(S - r) >= l`.
    Ball,
    /// `v_p(S - r) = l`.
    Sphere,
    /// `S - r ≡ α mod p^l` for some `α` in `1..p-1`.
    Residue,
}

impl Region {
    pub fn contains(self, s: u64, r: u64, p: Prime, l: u32) -> bool {
        let d = s.abs_diff(r);
        match self {
            Region::Ball => d == 0 || vp_u64(d, p).unwrap() >= l as u64,
            Region::Sphere => d != 0 && vp_u64(d, p).unwrap() == l as u64,
            Region::Residue => {
                let pl = match p.get().checked_pow(l) {
                    Some(pl) => pl as i128,
                    None => return false,
                };
                let alpha = (s as i128 - r as i128).rem_euclid(pl);
                alpha >= 1 && alpha < p.get() as i128
            }
        }
    }
}

/// The law of `S_n = ξ_1 + ... + ξ_n`: `w_j = C(n, j) q'^j q^(n-j)`, stored as
/// integer numerators over the common denominator `b^n` (`q = a/b`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumDistribution {
    n: u64,
    prime: Prime,
    numerators: Vec<BigInt>,
    denominator: BigInt,
}

impl SumDistribution {
    pub fn new(n: u64, params: &BernoulliParams) -> Self {
        let (a, c, b) = params.integer_parts();
        let len = n as usize + 1;
        // c^j and a^(n-j) built incrementally
        let mut c_pow = Vec::with_capacity(len);
        let mut x = BigInt::one();
        for _ in 0..len {
            c_pow.push(x.clone());
            x *= &c;
        }
        let mut a_pow = vec![BigInt::one(); len];
        for j in (0..n as usize).rev() {
            a_pow[j] = &a_pow[j + 1] * &a;
        }
        let mut binom = BigInt::one();
        let mut numerators = Vec::with_capacity(len);
        for j in 0..len {
            if j > 0 {
                binom = binom * (n - j as u64 + 1) / j as u64;
            }
            numerators.push(&binom * &c_pow[j] * &a_pow[j]);
        }
        SumDistribution {
            n,
            prime: params.prime,
            numerators,
            denominator: num_traits::pow(b, n as usize),
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn weight(&self, j: u64) -> Rational {
        Rational::new(self.numerators[j as usize].clone(), self.denominator.clone())
    }

    pub fn weights(&self) -> Vec<Rational> {
        (0..=self.n).map(|j| self.weight(j)).collect()
    }

    /// P(S_n ∈ region(r, l)).
    pub fn prob(&self, region: Region, r: u64, l: u32) -> Rational {
        let num: BigInt = self
            .numerators
            .iter()
            .enumerate()
            .filter(|(j, _)| region.contains(*j as u64, r, self.prime, l))
            .map(|(_, w)| w)
            .sum();
        Rational::new(num, self.denominator.clone())
    }

    pub fn prob_ball(&self, r: u64, l: u32) -> Rational {
        self.prob(Region::Ball, r, l)
    }

    pub fn prob_sphere(&self, r: u64, l: u32) -> Rational {
        self.prob(Region::Sphere, r, l)
    }

    /// E[f(S_n)].
    pub fn expectation(&self, f: impl Fn(u64) -> Rational) -> Rational {
        let mut acc = Rational::zero();
        for (j, w) in self.numerators.iter().enumerate() {
            if !w.is_zero() {
                acc += f(j as u64) * rational::from_big(w.clone());
            }
        }
        acc / rational::from_big(self.denominator.clone())
    }
}

pub fn prob_ball(n: u64, params: &BernoulliParams, r: u64, l: u32) -> Rational {
    SumDistribution::new(n, params).prob_ball(r, l)
}

pub fn prob_sphere(n: u64, params: &BernoulliParams, r: u64, l: u32) -> Rational {
    SumDistribution::new(n, params).prob_sphere(r, l)
}

/// p-adic distance from `x` to `y` as a valuation.
pub(crate) fn vp_distance(x: &Rational, y: &Rational, p: Prime) -> Valuation {
    vp(&(x - y), p)
}
