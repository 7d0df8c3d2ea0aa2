use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::json;

use super::distribution::{BernoulliParams, Region, SumDistribution};
use crate::error::{Error, Result};
use crate::frequency::{Collective, LabelSet, SequenceSelector};
use crate::padic::{vp, Valuation};
use crate::prime::Prime;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomnessOptions {
    pub l: u32,
    pub r: u64,
    /// ε = p^-eps_exp.
    pub eps_exp: i64,
    pub kmin: u32,
    pub kmax: u32,
    /// `Sphere` (v_p(S - r) = l) or `Residue` (S - r ≡ α mod p^l, α in 1..p-1).
    pub mode: Region,
}

impl RandomnessOptions {
    pub fn new(l: u32, r: u64, eps_exp: i64, kmax: u32) -> Self {
        RandomnessOptions {
            l,
            r,
            eps_exp,
            kmin: 1,
            kmax,
            mode: Region::Sphere,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphereRow {
    pub k: u32,
    pub n: u64,
    /// P(S_{N_k} ∈ S_{p^-l}(r)) under fair bits.
    pub prob: Rational,
    pub vp: Valuation,
    /// S_{N_k}(ω).
    pub sum: u64,
    pub hit: bool,
}

/// The critical region split into the disjoint parts "first hit at k".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnionReport {
    pub parts: Vec<(u32, Rational)>,
    pub union: Rational,
    pub union_valuation: Valuation,
    /// v_p(union) >= min_k v_p(part_k).
    pub ultrametric_ok: bool,
    /// |P(Ω^ε)|_p < ε.
    pub significant: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    /// ω hit the region at some checkpoint k >= k_ε; `persistent` when it hit at all of them.
    Rejected { first_hit: u32, persistent: bool },
    NotRejected,
}

impl Decision {
    pub fn name(self) -> &'static str {
        match self {
            Decision::Rejected { .. } => "Rejected",
            Decision::NotRejected => "NotRejected",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomnessReport {
    pub prime: Prime,
    pub options: RandomnessOptions,
    pub rows: Vec<SphereRow>,
    pub k_eps: u32,
    /// Absent when the checkpoints are too far out for the exact computation.
    pub union: Option<UnionReport>,
    pub decision: Decision,
}

impl RandomnessReport {
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<_> = self
            .rows
            .iter()
            .map(|r| {
                json!({
                    "k": r.k,
                    "N_k": r.n,
                    "prob": rational::to_fraction_string(&r.prob),
                    "vp": r.vp,
                    "sum": r.sum,
                    "hit": r.hit,
                })
            })
            .collect();
        let union = self.union.as_ref().map(|u| {
            json!({
                "parts": u.parts.iter().map(|(k, v)| json!({"k": k, "prob": rational::to_fraction_string(v), "vp": vp(v, self.prime)})).collect::<Vec<_>>(),
                "union": rational::to_fraction_string(&u.union),
                "vp": u.union_valuation,
                "significant": u.significant,
            })
        });
        let (first_hit, persistent) = match self.decision {
            Decision::Rejected { first_hit, persistent } => (Some(first_hit), persistent),
            Decision::NotRejected => (None, false),
        };
        json!({
            "test": "randomness",
            "params": {
                "p": self.prime.get(),
                "l": self.options.l,
                "r": self.options.r,
                "eps_exp": self.options.eps_exp,
                "kmin": self.options.kmin,
                "kmax": self.options.kmax,
                "mode": format!("{:?}", self.options.mode).to_lowercase(),
            },
            "k_eps": self.k_eps,
            "verdict": self.decision.name(),
            "first_hit": first_hit,
            "persistent_hit": persistent,
            "rows": rows,
            "union": union,
        })
    }
}

/// Least `s` with `m <= p^s - 1`.
pub(crate) fn digits_needed(m: u64, p: Prime) -> u32 {
    let mut s = 0u32;
    while (p.get() as u128).pow(s) <= m as u128 {
        s += 1;
    }
    s
}

const UNION_LIMIT: u64 = 5_000;

/// The part of the test that does not depend on ω: checkpoints, sphere
/// probabilities, `k_ε` (the first index after which every computed
/// probability has `|·|_p < ε`) and the exact probability of the region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalRegion {
    pub prime: Prime,
    pub options: RandomnessOptions,
    /// `(k, N_k, probability)` for every checkpoint in the window.
    pub checkpoints: Vec<(u32, u64, Rational)>,
    pub k_eps: u32,
    /// Absent when the checkpoints are too far out for the exact computation.
    pub union: Option<UnionReport>,
}

pub fn critical_region(selector: &SequenceSelector, opts: &RandomnessOptions) -> Result<CriticalRegion> {
    let p = selector.prime();
    if opts.mode == Region::Ball {
        return Err(Error::InvalidParameter("the test uses the sphere or residue reading".into()));
    }
    let m = match selector.target() {
        Some(t) if t.is_integer() && t >= Rational::zero() => {
            t.to_integer().try_into().map_err(|_| Error::HypothesisViolation("target too large".into()))?
        }
        _ => {
            return Err(Error::HypothesisViolation(
                "the selector must converge to a natural number m".into(),
            ))
        }
    };
    let s: u32 = digits_needed(m, p);
    if opts.l < s || opts.r > m {
        return Err(Error::HypothesisViolation(format!(
            "need r <= m = {m} and l >= {s} (got r = {}, l = {})",
            opts.r, opts.l
        )));
    }
    let params = BernoulliParams::symmetric(p)?;
    let checkpoints: Vec<_> = selector
        .terms(opts.kmax)?
        .into_iter()
        .filter(|t| t.k >= opts.kmin)
        .map(|t| (t.k, t.n, SumDistribution::new(t.n, &params).prob_sphere(opts.r, opts.l)))
        .collect();
    if checkpoints.is_empty() {
        return Err(Error::InvalidParameter("no checkpoints between kmin and kmax".into()));
    }
    // |P|_p < p^-E  <=>  v_p(P) > E
    let start = checkpoints
        .iter()
        .rposition(|(_, _, pr)| !vp(pr, p).at_least(opts.eps_exp + 1))
        .map_or(0, |i| i + 1);
    if start == checkpoints.len() {
        return Err(Error::RegionNotSignificant(format!(
            "|P|_{p} >= {p}^-{} at the last checkpoint; no k_eps on this window",
            opts.eps_exp
        )));
    }
    let k_eps = checkpoints[start].0;
    let last = checkpoints[checkpoints.len() - 1].1;
    let union = (last <= UNION_LIMIT).then(|| union_report(p, opts, &checkpoints[start..]));
    if union.is_none() {
        log::warn!("N_k up to {last}: skipping the exact critical-region probability");
    }
    Ok(CriticalRegion {
        prime: p,
        options: *opts,
        checkpoints,
        k_eps,
        union,
    })
}

impl CriticalRegion {
    /// `(k, S_{N_k}(ω), hit)` at every checkpoint.
    pub fn hits(&self, omega: &Collective) -> Result<Vec<(u32, u64, bool)>> {
        if omega.alphabet().len() != 2 {
            return Err(Error::AlphabetMismatch("the test needs a binary collective".into()));
        }
        let last = self.checkpoints[self.checkpoints.len() - 1].1;
        let prefix = omega.prefix(last as usize)?;
        let ones = LabelSet::of(&[1]);
        let (mut pos, mut sum) = (0usize, 0u64);
        let o = &self.options;
        Ok(self
            .checkpoints
            .iter()
            .map(|&(k, n, _)| {
                sum += prefix[pos..n as usize].iter().filter(|&&b| ones.contains(b)).count() as u64;
                pos = n as usize;
                (k, sum, o.mode.contains(sum, o.r, self.prime, o.l))
            })
            .collect())
    }

    /// ω ∈ Ω^ε: a hit at some checkpoint `k >= k_ε`.
    pub fn contains(&self, omega: &Collective) -> Result<bool> {
        Ok(self.hits(omega)?.iter().any(|&(k, _, hit)| hit && k >= self.k_eps))
    }
}

/// The sphere test: reject ω when `S_{N_k}(ω)` lands in the region at some
/// checkpoint `k >= k_ε`.
pub fn randomness_test(
    omega: &Collective,
    selector: &SequenceSelector,
    opts: &RandomnessOptions,
) -> Result<RandomnessReport> {
    let region = critical_region(selector, opts)?;
    let hits = region.hits(omega)?;
    let rows: Vec<SphereRow> = region
        .checkpoints
        .iter()
        .zip(hits)
        .map(|((k, n, prob), (_, sum, hit))| SphereRow {
            k: *k,
            n: *n,
            vp: vp(prob, region.prime),
            prob: prob.clone(),
            sum,
            hit,
        })
        .collect();
    let tail: Vec<_> = rows.iter().filter(|r| r.k >= region.k_eps).collect();
    let decision = match tail.iter().find(|r| r.hit) {
        Some(first) => Decision::Rejected {
            first_hit: first.k,
            persistent: tail.iter().all(|r| r.hit),
        },
        None => Decision::NotRejected,
    };
    Ok(RandomnessReport {
        prime: region.prime,
        options: *opts,
        rows,
        k_eps: region.k_eps,
        union: region.union,
        decision,
    })
}

/// Exact P(first hit at k) for fair bits, by propagating the counts of
/// not-yet-hit paths through the checkpoints.
fn union_report(p: Prime, opts: &RandomnessOptions, checkpoints: &[(u32, u64, Rational)]) -> UnionReport {
    let mut counts = vec![BigInt::one()];
    let mut n = 0u64;
    let mut parts = Vec::with_capacity(checkpoints.len());
    for &(k, next, _) in checkpoints {
        counts = advance(&counts, next - n);
        n = next;
        let mut hit = BigInt::zero();
        for (s, c) in counts.iter_mut().enumerate() {
            if opts.mode.contains(s as u64, opts.r, p, opts.l) {
                hit += &*c;
                *c = BigInt::zero();
            }
        }
        parts.push((k, Rational::new(hit, BigInt::one() << n)));
    }
    let union: Rational = parts.iter().map(|(_, v)| v.clone()).sum();
    let union_valuation = vp(&union, p);
    let min_part = parts.iter().map(|(_, v)| vp(v, p)).min().unwrap_or(Valuation::Infinite);
    UnionReport {
        ultrametric_ok: union_valuation >= min_part,
        significant: union_valuation.at_least(opts.eps_exp + 1),
        parts,
        union,
        union_valuation,
    }
}

/// Adds `delta` fair bits: convolution with the row C(delta, ·).
fn advance(counts: &[BigInt], delta: u64) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(delta as usize + 1);
    let mut c = BigInt::one();
    for i in 0..=delta {
        if i > 0 {
            c = c * (delta - i + 1) / i;
        }
        row.push(c.clone());
    }
    let mut out = vec![BigInt::zero(); counts.len() + delta as usize];
    for (s, a) in counts.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (i, b) in row.iter().enumerate() {
            out[s + i] += a * b;
        }
    }
    out
}

/// A bit sequence of length `checkpoints.last()` whose partial sums land in the
/// region at every checkpoint: each stretch is forward-filled with the fewest
/// ones that reach the next admissible sum.
pub fn checkpoint_forcing(checkpoints: &[u64], p: Prime, r: u64, l: u32, mode: Region) -> Result<Vec<u8>> {
    let mut bits = Vec::new();
    let mut sum = 0u64;
    for &n in checkpoints {
        let delta = n
            .checked_sub(bits.len() as u64)
            .ok_or_else(|| Error::InvalidParameter("checkpoints must increase".into()))?;
        let target = (sum..=sum + delta)
            .find(|&s| mode.contains(s, r, p, l))
            .ok_or_else(|| Error::InvalidParameter(format!("no admissible partial sum reachable at N = {n}")))?;
        let ones = (target - sum) as usize;
        bits.extend(std::iter::repeat_n(1u8, ones));
        bits.extend(std::iter::repeat_n(0u8, delta as usize - ones));
        sum = target;
    }
    Ok(bits)
}
