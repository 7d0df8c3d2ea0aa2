use num_traits::One;
use serde_json::json;

use super::binomial::binom;
use super::distribution::{BernoulliParams, SumDistribution};
use super::{ConvergenceTrace, TheoremOptions, TheoremReport};
use crate::error::{Error, Result};
use crate::frequency::SequenceSelector;
use crate::prime::Prime;
use crate::rational::{self, Rational};

fn check_target(selector: &SequenceSelector, p: Prime, m: u64) -> Result<()> {
    if selector.prime() != p {
        return Err(Error::InvalidParameter(format!(
            "selector uses prime {} but the check uses {p}",
            selector.prime()
        )));
    }
    match selector.target() {
        Some(t) if t == rational::int(m as i64) => Ok(()),
        Some(t) => Err(Error::InvalidTarget(format!(
            "selector converges to {} instead of {m}",
            rational::to_text(&t)
        ))),
        None => Err(Error::InvalidTarget(format!("selector has no declared target; expected {m}"))),
    }
}

/// C(m, r) / 2^m.
fn binomial_mass(m: u64, r: u64) -> Result<Rational> {
    Ok(Rational::new(binom(m, r)?.into(), num_traits::pow(2.into(), m as usize)))
}

fn ball_trace(
    p: Prime,
    r: u64,
    l: u32,
    limit: Rational,
    selector: &SequenceSelector,
    opts: &TheoremOptions,
) -> Result<ConvergenceTrace> {
    let params = BernoulliParams::symmetric(p)?;
    let mut trace = ConvergenceTrace::new(p, limit);
    for t in selector.terms(opts.kmax)? {
        let value = SumDistribution::new(t.n, &params).prob_ball(r, l);
        trace.push(t.k, t.n, value);
    }
    Ok(trace)
}

/// P(S_{N_k} ∈ U_{p^-l}(r)) along `N_k -> m`, against the limit C(m, r)/2^m.
pub fn verify_thm31(
    p: Prime,
    m: u64,
    r: u64,
    l: u32,
    selector: &SequenceSelector,
    opts: &TheoremOptions,
) -> Result<TheoremReport> {
    // least s with m <= p^s - 1
    let mut s = 0u32;
    while (p.get() as u128).pow(s) <= m as u128 {
        s += 1;
    }
    if r > m {
        return Err(Error::HypothesisViolation(format!("r = {r} exceeds m = {m}")));
    }
    if l < s {
        return Err(Error::HypothesisViolation(format!(
            "m = {m} needs p^s - 1 >= m with s = {s}, so the ball depth l must be at least {s} (got {l})"
        )));
    }
    check_target(selector, p, m)?;
    let trace = ball_trace(p, r, l, binomial_mass(m, r)?, selector, opts)?;
    let params = json!({"p": p.get(), "m": m, "r": r, "l": l, "selector": selector.to_string(), "kmax": opts.kmax});
    Ok(TheoremReport::new("thm31", params, trace, opts))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eq5Report {
    /// P(p divides S_{N_k}).
    pub divisible: TheoremReport,
    pub complement: TheoremReport,
    /// The two values sum to 1 at every k.
    pub complement_identity: bool,
}

/// The divisibility event and its complement along `N_k -> 1`; both tend to 1/2.
pub fn verify_eq5(p: Prime, selector: &SequenceSelector, opts: &TheoremOptions) -> Result<Eq5Report> {
    check_target(selector, p, 1)?;
    let half = rational::frac(1, 2);
    let div = ball_trace(p, 0, 1, half.clone(), selector, opts)?;
    let mut comp = ConvergenceTrace::new(p, half);
    for row in &div.rows {
        let params = BernoulliParams::symmetric(p)?;
        let d = SumDistribution::new(row.n, &params);
        let value: Rational = (1..p.get()).map(|r| d.prob_ball(r, 1)).sum();
        comp.push(row.k, row.n, value);
    }
    let complement_identity = div
        .rows
        .iter()
        .zip(&comp.rows)
        .all(|(a, b)| &a.value + &b.value == Rational::one());
    let params = json!({"p": p.get(), "selector": selector.to_string(), "kmax": opts.kmax});
    Ok(Eq5Report {
        divisible: TheoremReport::new("eq5", params.clone(), div, opts),
        complement: TheoremReport::new("eq5-complement", params, comp, opts),
        complement_identity,
    })
}

/// P(S_{N_k} ∈ U_{p^-l}(r)) along `N_k -> p`, against C(p, r)/2^p.
pub fn verify_thm32(
    p: Prime,
    r: u64,
    l: u32,
    selector: &SequenceSelector,
    opts: &TheoremOptions,
) -> Result<TheoremReport> {
    let pp = p.get();
    if r > pp {
        return Err(Error::HypothesisViolation(format!("r = {r} exceeds p = {pp}")));
    }
    let min_l = if r == 0 || r == pp { 2 } else { 1 };
    if l < min_l {
        return Err(Error::HypothesisViolation(format!(
            "r = {r} needs ball depth at least {min_l} (got {l})"
        )));
    }
    check_target(selector, p, pp)?;
    let trace = ball_trace(p, r, l, binomial_mass(pp, r)?, selector, opts)?;
    let params = json!({"p": pp, "r": r, "l": l, "selector": selector.to_string(), "kmax": opts.kmax});
    Ok(TheoremReport::new("thm32", params, trace, opts))
}

/// Atoms `r = 0..m` with weights C(m, r)/2^m.
pub fn kappa_limit(m: u64) -> Vec<(u64, Rational)> {
    (0..=m)
        .map(|r| (r, binomial_mass(m, r).expect("r <= m")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit::TheoremVerdict;
    use crate::padic::Valuation;
    use crate::rational::{frac, int};

    fn pr(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn fin(v: &[i64]) -> Vec<Valuation> {
        v.iter().map(|&x| Valuation::Finite(x)).collect()
    }

    #[test]
    fn thm31_traces() {
        let p = pr(3);
        let sel = SequenceSelector::affine(p, 2, 1).unwrap();
        let opts = TheoremOptions::new(7);
        for r in 0..=2 {
            let rep = verify_thm31(p, 2, r, 1, &sel, &opts).unwrap();
            assert_eq!(rep.trace.valuations(), fin(&[1, 2, 3, 4, 5, 6, 7]), "r = {r}");
            assert_eq!(rep.verdict, TheoremVerdict::Converging);
            let rep = verify_thm31(p, 2, r, 2, &sel, &opts).unwrap();
            assert_eq!(rep.trace.valuations(), fin(&[0, 1, 2, 3, 4, 5, 6]), "r = {r}");
        }
        let rep = verify_thm31(p, 2, 1, 1, &sel, &opts).unwrap();
        assert_eq!(rep.trace.limit, frac(1, 2));
        assert_eq!(rep.trace.rows[0].value, frac(5, 16));
        assert_eq!(rep.trace.rows[1].value, frac(341, 1024));
    }

    #[test]
    fn thm31_hypotheses() {
        let p = pr(3);
        let sel = SequenceSelector::affine(p, 2, 1).unwrap();
        let opts = TheoremOptions::new(3);
        assert!(matches!(verify_thm31(p, 2, 3, 1, &sel, &opts), Err(Error::HypothesisViolation(_))));
        assert!(matches!(verify_thm31(p, 2, 1, 0, &sel, &opts), Err(Error::HypothesisViolation(_))));
        let sel4 = SequenceSelector::affine(p, 4, 1).unwrap();
        // m = 4 needs s = 2
        assert!(matches!(verify_thm31(p, 4, 1, 1, &sel4, &opts), Err(Error::HypothesisViolation(_))));
        assert!(verify_thm31(p, 4, 1, 2, &sel4, &opts).is_ok());
        assert!(matches!(verify_thm31(p, 2, 1, 1, &sel4, &opts), Err(Error::InvalidTarget(_))));
    }

    #[test]
    fn eq5_traces() {
        for (p, expected) in [(3, [1, 2, 3, 4, 5]), (5, [2, 3, 4, 5, 6])] {
            let p = pr(p);
            let sel = SequenceSelector::affine(p, 1, 1).unwrap();
            let rep = verify_eq5(p, &sel, &TheoremOptions::new(5)).unwrap();
            assert!(rep.complement_identity);
            assert_eq!(rep.divisible.trace.valuations(), fin(&expected));
            assert_eq!(rep.complement.trace.valuations(), fin(&expected));
            assert_eq!(rep.divisible.verdict, TheoremVerdict::Converging);
        }
    }

    #[test]
    fn thm32_traces() {
        let p = pr(3);
        let sel = SequenceSelector::affine(p, 3, 1).unwrap();
        let opts = TheoremOptions::new(7);
        let rep = verify_thm32(p, 1, 2, &sel, &opts).unwrap();
        assert_eq!(rep.trace.limit, frac(3, 8));
        // not monotone at the start, monotone on the tail
        assert_eq!(rep.trace.valuations(), fin(&[2, 6, 4, 5, 6, 7, 8]));
        assert_eq!(rep.verdict, TheoremVerdict::Converging);
        let rep = verify_thm32(p, 0, 2, &sel, &opts).unwrap();
        assert_eq!(rep.trace.valuations(), fin(&[0, 1, 2, 3, 4, 5, 6]));
        assert_eq!(verify_thm32(p, 3, 2, &sel, &opts).unwrap().trace.limit, frac(1, 8));
        assert!(matches!(verify_thm32(p, 0, 1, &sel, &opts), Err(Error::HypothesisViolation(_))));
    }

    #[test]
    fn kappa() {
        assert_eq!(kappa_limit(0), vec![(0, int(1))]);
        assert_eq!(kappa_limit(2), vec![(0, frac(1, 4)), (1, frac(1, 2)), (2, frac(1, 4))]);
        for m in 0..12 {
            assert_eq!(kappa_limit(m).into_iter().map(|(_, w)| w).sum::<Rational>(), int(1));
        }
    }
}
