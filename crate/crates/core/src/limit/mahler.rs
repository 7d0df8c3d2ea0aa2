use num_traits::{One, Zero};
use serde_json::json;

use super::binomial::{binom_rational, padic_binomial};
use super::distribution::BernoulliParams;
use super::{ConvergenceTrace, TheoremOptions, TheoremReport};
use crate::error::{Error, Result};
use crate::frequency::SequenceSelector;
use crate::padic::{abs_p, vp, FormalSeries, PadicAbs, PadicApprox, Valuation};
use crate::prime::Prime;
use crate::rational::{self, Rational};

/// The number of summands: a natural `n` or a p-adic limit `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Exponent {
    Natural(u64),
    Padic(PadicApprox),
}

fn check_prime(a: &PadicApprox, p: Prime) -> Result<()> {
    if a.prime() != p {
        return Err(Error::InvalidParameter(format!(
            "exponent is {}-adic but the parameters are {p}-adic",
            a.prime()
        )));
    }
    Ok(())
}

/// φ(z) = (1 + q'(e^z - 1))^n, through `z^order`.
pub fn charfun(exponent: &Exponent, params: &BernoulliParams, order: usize) -> Result<FormalSeries> {
    let base = FormalSeries::one(order).add(&FormalSeries::exp_minus_one(order).scale(&params.q_prime()))?;
    match exponent {
        Exponent::Natural(n) => Ok(base.integer_power(*n)),
        Exponent::Padic(a) => {
            check_prime(a, params.prime())?;
            base.padic_power(a)
        }
    }
}

/// λ_m = (1 - q)^m C(a, m) for a rational p-adic integer `a`.
pub fn mahler_lambda(params: &BernoulliParams, a: &Rational, m: u64) -> Result<Rational> {
    if !vp(a, params.prime()).at_least(0) {
        return Err(Error::Domain(format!("a = {} is not in Z_{}", rational::to_text(a), params.prime())));
    }
    Ok(num_traits::pow(params.q_prime(), m as usize) * binom_rational(a, m))
}

pub fn mahler_lambda_padic(params: &BernoulliParams, a: &PadicApprox, m: u64) -> Result<PadicApprox> {
    check_prime(a, params.prime())?;
    let c = padic_binomial(a, m)?;
    let q = num_traits::pow(params.q_prime(), m as usize);
    if q.is_zero() {
        return Ok(PadicApprox::zero(params.prime()));
    }
    let prec = c.precision().max(1);
    c.mul(&PadicApprox::from_rational(&q, params.prime(), prec))
}

/// λ_{m,n} = E[C(S_n, m)] = (1 - q)^m C(n, m).
pub fn empirical_mahler(params: &BernoulliParams, n: u64, m: u64) -> Rational {
    num_traits::pow(params.q_prime(), m as usize) * binom_rational(&rational::int(n as i64), m)
}

/// One trace per `m = 0..=mmax` of `λ_{m,N_k}` toward `λ_m(a)`.
pub fn verify_lln(
    params: &BernoulliParams,
    a: &Rational,
    selector: &SequenceSelector,
    mmax: u64,
    opts: &TheoremOptions,
) -> Result<Vec<TheoremReport>> {
    let p = params.prime();
    if selector.prime() != p {
        return Err(Error::InvalidParameter("selector and parameters use different primes".into()));
    }
    match selector.target() {
        Some(t) if &t != a => {
            return Err(Error::InvalidTarget(format!(
                "selector converges to {} instead of {}",
                rational::to_text(&t),
                rational::to_text(a)
            )))
        }
        _ => {}
    }
    let terms = selector.terms(opts.kmax)?;
    let mut out = Vec::new();
    for m in 0..=mmax {
        let mut trace = ConvergenceTrace::new(p, mahler_lambda(params, a, m)?);
        for t in &terms {
            trace.push(t.k, t.n, empirical_mahler(params, t.n, m));
        }
        let info = json!({
            "p": p.get(),
            "q": rational::to_fraction_string(params.q()),
            "a": rational::to_fraction_string(a),
            "m": m,
            "selector": selector.to_string(),
            "kmax": opts.kmax,
        });
        out.push(TheoremReport::new("lln", info, trace, opts));
    }
    Ok(out)
}

/// ψ(z) = (cosh(z/√n))^n, built from `cosh(z/√n) = Σ z^{2k} / ((2k)! n^k)` so
/// no square root is taken. `order` must be even.
pub fn clt_charfun(exponent: &Exponent, order: usize) -> Result<FormalSeries> {
    if order % 2 == 1 {
        return Err(Error::Order(format!("the series is even; use an even order, not {order}")));
    }
    let x = match exponent {
        Exponent::Natural(0) => return Err(Error::InvalidParameter("n must be at least 1".into())),
        Exponent::Natural(n) => rational::int(*n as i64),
        Exponent::Padic(a) => {
            if a.is_zero() || a.valuation() != 0 {
                return Err(Error::Domain(format!(
                    "ψ(z, a) divides by a; a must be a {}-adic unit",
                    a.prime()
                )));
            }
            a.representative()
        }
    };
    let mut coeffs = vec![Rational::zero(); order + 1];
    let mut c = Rational::one();
    for k in 0..=order / 2 {
        if k > 0 {
            c = c / (rational::int((2 * k * (2 * k - 1)) as i64) * &x);
        }
        coeffs[2 * k] = c.clone();
    }
    let base = FormalSeries::new(coeffs)?;
    match exponent {
        Exponent::Natural(n) => Ok(base.integer_power(*n)),
        Exponent::Padic(a) => base.padic_power(a),
    }
}

/// Mahler coefficients `λ_0..λ_M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MahlerSeq {
    pub coeffs: Vec<Rational>,
}

impl MahlerSeq {
    pub fn max_abs(&self, p: Prime) -> PadicAbs {
        self.coeffs
            .iter()
            .map(|c| abs_p(c, p))
            .fold(PadicAbs::zero(p), |a, b| if b > a { b } else { a })
    }

    pub fn valuations(&self, p: Prime) -> Vec<Valuation> {
        self.coeffs.iter().map(|c| vp(c, p)).collect()
    }
}

/// Writes φ(z) = Σ λ_m (e^z - 1)^m and reads off λ_m as the coefficients of φ(log(1 + w)).
pub fn charfun_to_mahler(phi: &FormalSeries, m_max: usize) -> Result<MahlerSeq> {
    if m_max > phi.order() {
        return Err(Error::Order(format!(
            "{m_max} Mahler coefficients need a series of order at least {m_max}, got {}",
            phi.order()
        )));
    }
    let phi = phi.truncate(m_max);
    let composed = phi.compose(&FormalSeries::log1p(m_max))?;
    Ok(MahlerSeq {
        coeffs: composed.into_coeffs(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gamma1Report {
    pub prime: Prime,
    pub m_max: usize,
    pub coeffs: MahlerSeq,
    pub max_abs: PadicAbs,
    /// Every |λ_m|_p <= 1 for m <= m_max.
    pub bounded: bool,
    /// λ_0 = 1, λ_1 = 0 and λ_m = (-1)^m/2 beyond.
    pub matches_closed_form: bool,
    pub note: &'static str,
}

/// Mahler coefficients of cosh z (the limit ψ(z, 1)) up to `m_max`, with their
/// p-adic sizes. A finite check, not a proof of boundedness.
pub fn gamma1_bounded_check(p: Prime, m_max: usize) -> Result<Gamma1Report> {
    if p.get() == 2 {
        return Err(Error::HypothesisViolation("the check is stated for odd primes".into()));
    }
    if m_max < 2 {
        return Err(Error::InvalidParameter("m_max must be at least 2".into()));
    }
    let coeffs = charfun_to_mahler(&FormalSeries::cosh(m_max), m_max)?;
    let max_abs = coeffs.max_abs(p);
    let expected = |m: usize| match m {
        0 => Rational::one(),
        1 => Rational::zero(),
        m if m % 2 == 0 => rational::frac(1, 2),
        _ => rational::frac(-1, 2),
    };
    let matches_closed_form = coeffs.coeffs.iter().enumerate().all(|(m, c)| *c == expected(m));
    Ok(Gamma1Report {
        prime: p,
        m_max,
        bounded: max_abs <= PadicAbs::one(p),
        max_abs,
        coeffs,
        matches_closed_form,
        note: "finite check of the first coefficients; not a proof",
    })
}

/// Exploratory: Mahler coefficients of ψ(z, a) with their valuations, no verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaReport {
    pub a: PadicApprox,
    pub coeffs: MahlerSeq,
    pub valuations: Vec<Valuation>,
}

pub fn gamma_a_report(a: &PadicApprox, m_max: usize) -> Result<GammaReport> {
    let order = m_max + m_max % 2;
    let psi = clt_charfun(&Exponent::Padic(a.clone()), order)?;
    let coeffs = charfun_to_mahler(&psi, m_max)?;
    let valuations = coeffs.valuations(a.prime());
    Ok(GammaReport {
        a: a.clone(),
        coeffs,
        valuations,
    })
}
