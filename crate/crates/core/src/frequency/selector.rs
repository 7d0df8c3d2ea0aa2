use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::padic::{vp, Ball, Valuation};
use crate::prime::Prime;
use crate::rational::{self, Rational};

/// How the index sequence `N_k` approaches its p-adic target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scheme {
    /// `N_k = m + t p^k`.
    Affine { m: u64, t: u64 },
    /// `N_k` = canonical representative of `m mod p^k`.
    Truncation { m: Rational },
    /// `N_k = t p^k`, converging to 0.
    Power { t: u64 },
    /// A caller-supplied list, with an optional declared target.
    Explicit { terms: Vec<u64>, target: Option<Rational> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceSelector {
    prime: Prime,
    scheme: Scheme,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Term {
    pub k: u32,
    pub n: u64,
}

/// The ball that contains every s-probability for a selector, or no bound for target 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RangeBall {
    Bounded(Ball),
    Unbounded,
}

impl RangeBall {
    pub fn contains(&self, x: &Rational) -> bool {
        match self {
            RangeBall::Bounded(b) => b.contains(x),
            RangeBall::Unbounded => true,
        }
    }
}

impl SequenceSelector {
    pub fn new(prime: Prime, scheme: Scheme) -> Result<Self> {
        match &scheme {
            Scheme::Affine { t, .. } | Scheme::Power { t } if *t == 0 => {
                return Err(Error::InvalidParameter("t must be at least 1".into()))
            }
            Scheme::Truncation { m } => {
                if !vp(m, prime).at_least(0) {
                    return Err(Error::InvalidTarget(format!(
                        "{} is not a {prime}-adic integer",
                        rational::to_text(m)
                    )));
                }
            }
            Scheme::Explicit { target: Some(m), .. } if !vp(m, prime).at_least(0) => {
                return Err(Error::InvalidTarget(format!(
                    "{} is not a {prime}-adic integer",
                    rational::to_text(m)
                )));
            }
            _ => {}
        }
        Ok(SequenceSelector { prime, scheme })
    }

    pub fn affine(prime: Prime, m: u64, t: u64) -> Result<Self> {
        Self::new(prime, Scheme::Affine { m, t })
    }

    pub fn truncation(prime: Prime, m: Rational) -> Result<Self> {
        Self::new(prime, Scheme::Truncation { m })
    }

    pub fn power(prime: Prime, t: u64) -> Result<Self> {
        Self::new(prime, Scheme::Power { t })
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    /// The p-adic limit `m` of the index sequence, when known.
    pub fn target(&self) -> Option<Rational> {
        match &self.scheme {
            Scheme::Affine { m, .. } => Some(rational::int(*m as i64)),
            Scheme::Truncation { m } => Some(m.clone()),
            Scheme::Power { .. } => Some(Rational::zero()),
            Scheme::Explicit { target, .. } => target.clone(),
        }
    }

    /// Terms for `k = 1..=kmax`; zero and repeated values are skipped.
    pub fn terms(&self, kmax: u32) -> Result<Vec<Term>> {
        if kmax == 0 {
            return Err(Error::InvalidParameter("kmax must be at least 1".into()));
        }
        let p = self.prime.get();
        let pk = |k: u32| -> Result<u64> {
            p.checked_pow(k)
                .ok_or_else(|| Error::InvalidParameter(format!("{p}^{k} overflows 64 bits")))
        };
        let overflow = || Error::InvalidParameter("selector term overflows 64 bits".into());
        let mut raw = Vec::new();
        match &self.scheme {
            Scheme::Affine { m, t } => {
                for k in 1..=kmax {
                    let n = t.checked_mul(pk(k)?).and_then(|x| x.checked_add(*m)).ok_or_else(overflow)?;
                    raw.push(Term { k, n });
                }
            }
            Scheme::Power { t } => {
                for k in 1..=kmax {
                    let n = t.checked_mul(pk(k)?).ok_or_else(overflow)?;
                    raw.push(Term { k, n });
                }
            }
            Scheme::Truncation { m } => {
                for k in 1..=kmax {
                    let modulus = BigInt::from(pk(k)?);
                    let r = rational::mod_integer(m, &modulus).expect("target is a p-adic integer");
                    raw.push(Term {
                        k,
                        n: r.to_u64().expect("residue below 2^64"),
                    });
                }
            }
            Scheme::Explicit { terms, .. } => {
                for (i, &n) in terms.iter().take(kmax as usize).enumerate() {
                    raw.push(Term { k: i as u32 + 1, n });
                }
            }
        }
        let mut seen = BTreeSet::new();
        Ok(raw
            .into_iter()
            .filter(|t| {
                if t.n == 0 {
                    log::debug!("selector: skipping N_{} = 0", t.k);
                    false
                } else if !seen.insert(t.n) {
                    log::debug!("selector: skipping repeated N_{} = {}", t.k, t.n);
                    false
                } else {
                    true
                }
            })
            .collect())
    }

    /// `U_r(0)` with `r = 1/|m|_p`; unbounded for `m = 0` or an unknown target.
    pub fn range_ball(&self) -> RangeBall {
        match self.target().map(|m| vp(&m, self.prime)) {
            Some(Valuation::Finite(v)) => {
                RangeBall::Bounded(Ball::new(Rational::zero(), -v, self.prime))
            }
            _ => RangeBall::Unbounded,
        }
    }

    /// Parses `m+t*p^k`, `m+p^k`, `t*p^k`, `p^k`, `trunc(m)` or `list:N1,N2,...`.
    pub fn parse(spec: &str, prime: Prime) -> Result<Self> {
        let s: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("bad selector spec {spec:?}"));
        let nat = |x: &str| x.parse::<u64>().map_err(|_| bad());
        if let Some(inner) = s.strip_prefix("trunc(").and_then(|r| r.strip_suffix(')')) {
            return Self::truncation(prime, rational::parse_rational(inner)?);
        }
        if let Some(list) = s.strip_prefix("list:") {
            let terms = list.split(',').map(nat).collect::<Result<Vec<_>>>()?;
            return Self::new(prime, Scheme::Explicit { terms, target: None });
        }
        let power = |x: &str| -> Result<u64> {
            match x.strip_suffix("p^k").ok_or_else(bad)? {
                "" => Ok(1),
                t => nat(t.strip_suffix('*').ok_or_else(bad)?),
            }
        };
        match s.split_once('+') {
            Some((m, rest)) => Self::affine(prime, nat(m)?, power(rest)?),
            None => Self::power(prime, power(&s)?),
        }
    }
}

impl fmt::Display for SequenceSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.scheme {
            Scheme::Affine { m, t } => write!(f, "{m}+{t}*p^k"),
            Scheme::Truncation { m } => write!(f, "trunc({})", rational::to_text(m)),
            Scheme::Power { t } => write!(f, "{t}*p^k"),
            Scheme::Explicit { terms, .. } => {
                let t: Vec<String> = terms.iter().map(|n| n.to_string()).collect();
                write!(f, "list:{}", t.join(","))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn ns(s: &SequenceSelector, kmax: u32) -> Vec<u64> {
        s.terms(kmax).unwrap().iter().map(|t| t.n).collect()
    }

    #[test]
    fn affine_terms() {
        assert_eq!(ns(&SequenceSelector::affine(p(3), 2, 1).unwrap(), 3), vec![5, 11, 29]);
    }

    #[test]
    fn truncation_toward_minus_one() {
        let s = SequenceSelector::truncation(p(3), int(-1)).unwrap();
        assert_eq!(ns(&s, 3), vec![2, 8, 26]);
        for t in s.terms(10).unwrap() {
            let gap = rational::int(t.n as i64) + int(1);
            assert!(vp(&gap, p(3)).at_least(t.k as i64));
        }
    }

    #[test]
    fn truncation_skips_repeats() {
        // 2 mod 3^k = 2 for every k
        let s = SequenceSelector::truncation(p(3), int(2)).unwrap();
        assert_eq!(ns(&s, 5), vec![2]);
        // 1/2 in Z_3: 2, 5, 14, 41
        let s = SequenceSelector::truncation(p(3), rational::frac(1, 2)).unwrap();
        assert_eq!(ns(&s, 4), vec![2, 5, 14, 41]);
    }

    #[test]
    fn power_terms() {
        assert_eq!(ns(&SequenceSelector::power(p(5), 1).unwrap(), 2), vec![5, 25]);
    }

    #[test]
    fn invalid_target() {
        let e = SequenceSelector::truncation(p(3), rational::frac(1, 3)).unwrap_err();
        assert!(matches!(e, Error::InvalidTarget(_)));
    }

    #[test]
    fn range_balls() {
        let ball = |m: u64| match SequenceSelector::affine(p(3), m, 1).unwrap().range_ball() {
            RangeBall::Bounded(b) => b,
            RangeBall::Unbounded => panic!("bounded expected"),
        };
        assert_eq!(ball(2).depth, 0);
        assert_eq!(ball(3).depth, -1);
        assert_eq!(ball(3).radius().to_rational(), int(3));
        assert_eq!(SequenceSelector::power(p(3), 1).unwrap().range_ball(), RangeBall::Unbounded);
    }

    #[test]
    fn parses_specs() {
        let p3 = p(3);
        assert_eq!(SequenceSelector::parse("1+p^k", p3).unwrap().scheme(), &Scheme::Affine { m: 1, t: 1 });
        assert_eq!(SequenceSelector::parse("2 + 2*p^k", p3).unwrap().scheme(), &Scheme::Affine { m: 2, t: 2 });
        assert_eq!(SequenceSelector::parse("p^k", p3).unwrap().scheme(), &Scheme::Power { t: 1 });
        assert_eq!(SequenceSelector::parse("4*p^k", p3).unwrap().scheme(), &Scheme::Power { t: 4 });
        assert_eq!(
            SequenceSelector::parse("trunc(-1)", p3).unwrap().scheme(),
            &Scheme::Truncation { m: int(-1) }
        );
        assert_eq!(ns(&SequenceSelector::parse("list:5,11,5,0,29", p3).unwrap(), 9), vec![5, 11, 29]);
        for bad in ["", "x", "1+", "1+2*q^k", "trunc(1/3)", "list:", "0*p^k"] {
            assert!(SequenceSelector::parse(bad, p3).is_err(), "{bad}");
        }
        let s = SequenceSelector::parse("2+2*p^k", p3).unwrap();
        assert_eq!(SequenceSelector::parse(&s.to_string(), p3).unwrap(), s);
    }
}
