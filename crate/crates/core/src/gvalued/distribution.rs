use std::collections::BTreeMap;

use num_traits::Zero;
use serde_json::json;

use super::context::{GElement, GroupContext};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// The declared range Δ of a distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Delta {
    /// ρ(0, P(A)) <= radius.
    Ball(Rational),
    /// Every coordinate in `[lo, hi]` (real ordering).
    Interval(Rational, Rational),
}

impl Delta {
    pub fn contains(&self, ctx: &GroupContext, x: &GElement) -> bool {
        match self {
            Delta::Ball(r) => &ctx.rho(x) <= r,
            Delta::Interval(lo, hi) => x.0.iter().all(|v| v >= lo && v <= hi),
        }
    }
}

/// A finite outcome set with a G-valued weight per outcome; P(A) = Σ_{x∈A} w(x).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GDistribution {
    context: GroupContext,
    outcomes: Vec<String>,
    weights: Vec<GElement>,
    delta: Option<Delta>,
}

/// A field of subsets of `0..n`, stored as bitmasks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetField {
    n: usize,
    sets: Vec<u64>,
}

impl SetField {
    /// Checks that `sets` contains ∅ and Ω and is closed under complement and union.
    pub fn new(n: usize, sets: Vec<u64>) -> Result<Self> {
        if n > 64 {
            return Err(Error::InvalidParameter("at most 64 outcomes".into()));
        }
        let omega = full(n);
        let mut sorted = sets;
        sorted.sort_unstable();
        sorted.dedup();
        let has = |s: u64| sorted.binary_search(&s).is_ok();
        if let Some(&bad) = sorted.iter().find(|&&s| s & !omega != 0) {
            return Err(Error::NotAField(format!("set {bad:#b} mentions outcomes beyond {n}")));
        }
        if !has(0) || !has(omega) {
            return Err(Error::NotAField("a field contains the empty set and the whole space".into()));
        }
        for &a in &sorted {
            if !has(omega & !a) {
                return Err(Error::NotAField(format!("complement of {a:#b} missing")));
            }
            for &b in &sorted {
                if !has(a | b) {
                    return Err(Error::NotAField(format!("union of {a:#b} and {b:#b} missing")));
                }
            }
        }
        Ok(SetField { n, sets: sorted })
    }

    /// All subsets of `n <= 20` outcomes.
    pub fn power_set(n: usize) -> Result<Self> {
        if n > 20 {
            return Err(Error::InvalidParameter("power set limited to 20 outcomes".into()));
        }
        Ok(SetField {
            n,
            sets: (0..1u64 << n).collect(),
        })
    }

    /// Unions of the blocks of a partition of `0..n`.
    pub fn from_partition(n: usize, blocks: &[u64]) -> Result<Self> {
        if blocks.len() > 20 {
            return Err(Error::InvalidParameter("at most 20 blocks".into()));
        }
        let mut seen = 0u64;
        for &b in blocks {
            if b == 0 || b & seen != 0 {
                return Err(Error::NotAField("blocks must be nonempty and disjoint".into()));
            }
            seen |= b;
        }
        if seen != full(n) {
            return Err(Error::NotAField("blocks must cover every outcome".into()));
        }
        let sets = (0..1u64 << blocks.len())
            .map(|mask| {
                blocks
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .fold(0, |acc, (_, b)| acc | b)
            })
            .collect();
        Self::new(n, sets)
    }

    pub fn sets(&self) -> &[u64] {
        &self.sets
    }

    pub fn outcomes(&self) -> usize {
        self.n
    }
}

fn full(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl GDistribution {
    pub fn new(context: GroupContext, outcomes: Vec<String>, weights: Vec<GElement>) -> Result<Self> {
        if outcomes.len() != weights.len() {
            return Err(Error::InvalidParameter("one weight per outcome".into()));
        }
        if outcomes.len() > 64 {
            return Err(Error::InvalidParameter("at most 64 outcomes".into()));
        }
        for w in &weights {
            context.check(w)?;
        }
        Ok(GDistribution {
            context,
            outcomes,
            weights,
            delta: None,
        })
    }

    /// Scalar weights in a one-coordinate context, outcomes `0..n` as labels.
    pub fn scalar(context: GroupContext, outcomes: &[Rational], weights: &[Rational]) -> Result<Self> {
        let out = outcomes.iter().map(rational::to_text).collect();
        let w = weights.iter().map(|x| context.scalar(x.clone())).collect();
        Self::new(context, out, w)
    }

    /// Declares Δ and checks P(A) ∈ Δ on every set of `field`.
    pub fn with_delta(mut self, delta: Delta, field: &SetField) -> Result<Self> {
        for &a in field.sets() {
            let pa = self.prob(a);
            if !delta.contains(&self.context, &pa) {
                return Err(Error::Range(format!(
                    "P({}) = {} lies outside the declared range",
                    self.describe(a),
                    self.context.format(&pa)
                )));
            }
        }
        self.delta = Some(delta);
        Ok(self)
    }

    pub fn context(&self) -> &GroupContext {
        &self.context
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn weights(&self) -> &[GElement] {
        &self.weights
    }

    pub fn delta(&self) -> Option<&Delta> {
        self.delta.as_ref()
    }

    /// P(A) for a bitmask over outcome indices.
    pub fn prob(&self, set: u64) -> GElement {
        self.context.sum(
            self.weights
                .iter()
                .enumerate()
                .filter(|(i, _)| set >> i & 1 == 1)
                .map(|(_, w)| w),
        )
    }

    /// E = P(Ω).
    pub fn total(&self) -> GElement {
        self.context.sum(&self.weights)
    }

    fn describe(&self, set: u64) -> String {
        let names: Vec<&str> = self
            .outcomes
            .iter()
            .enumerate()
            .filter(|(i, _)| set >> i & 1 == 1)
            .map(|(_, s)| s.as_str())
            .collect();
        format!("{{{}}}", names.join(","))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let weights: Vec<serde_json::Value> = self
            .weights
            .iter()
            .map(|w| {
                if w.0.len() == 1 {
                    rational::to_fraction_string(&w.0[0]).into()
                } else {
                    w.0.iter().map(rational::to_fraction_string).collect::<Vec<_>>().into()
                }
            })
            .collect();
        json!({
            "context": self.context.to_string(),
            "outcomes": self.outcomes,
            "weights": weights,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let bad = |what: &str| Error::Parse(format!("distribution JSON: {what}"));
        let context: GroupContext = v["context"].as_str().ok_or_else(|| bad("context"))?.parse()?;
        let outcomes = v["outcomes"]
            .as_array()
            .ok_or_else(|| bad("outcomes"))?
            .iter()
            .map(|o| match o {
                serde_json::Value::String(s) => Ok(s.clone()),
                serde_json::Value::Number(n) => Ok(n.to_string()),
                _ => Err(bad("outcome")),
            })
            .collect::<Result<Vec<_>>>()?;
        let weights = v["weights"]
            .as_array()
            .ok_or_else(|| bad("weights"))?
            .iter()
            .map(|w| match w {
                serde_json::Value::String(s) => context.parse_element(s),
                serde_json::Value::Array(xs) => {
                    let coords = xs
                        .iter()
                        .map(|x| x.as_str().ok_or_else(|| bad("weight")).and_then(rational::parse_rational))
                        .collect::<Result<Vec<_>>>()?;
                    let e = GElement(coords);
                    context.check(&e)?;
                    Ok(e)
                }
                _ => Err(bad("weight")),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(context, outcomes, weights)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdditivityReport {
    pub holds: bool,
    pub pairs_checked: usize,
    pub counterexample: Option<(u64, u64)>,
}

/// P(A ∪ B) = P(A) + P(B) for every disjoint pair in the field.
pub fn additivity_check(d: &GDistribution, field: &SetField) -> Result<AdditivityReport> {
    check_field(d, field)?;
    let ctx = d.context();
    let mut pairs = 0;
    for &a in field.sets() {
        for &b in field.sets() {
            if a & b != 0 {
                continue;
            }
            pairs += 1;
            if d.prob(a | b) != ctx.add(&d.prob(a), &d.prob(b)) {
                return Ok(AdditivityReport {
                    holds: false,
                    pairs_checked: pairs,
                    counterexample: Some((a, b)),
                });
            }
        }
    }
    Ok(AdditivityReport {
        holds: true,
        pairs_checked: pairs,
        counterexample: None,
    })
}

fn check_field(d: &GDistribution, field: &SetField) -> Result<()> {
    if field.outcomes() != d.outcomes().len() {
        return Err(Error::NotAField(format!(
            "field over {} outcomes for a distribution with {}",
            field.outcomes(),
            d.outcomes().len()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitAxiomReport {
    pub holds: bool,
    /// max over the field of ρ(0, P(A)).
    pub sup: Rational,
    /// A set attaining the max.
    pub witness: u64,
    /// ρ(0, E).
    pub rho_total: Rational,
}

/// sup_{A ∈ F} ρ(0, P(A)) = ρ(0, E), over a finite field.
pub fn unit_axiom_check(d: &GDistribution, field: &SetField) -> Result<UnitAxiomReport> {
    check_field(d, field)?;
    let ctx = d.context();
    let (mut sup, mut witness) = (Rational::zero(), 0);
    for &a in field.sets() {
        let r = ctx.rho(&d.prob(a));
        if r > sup {
            sup = r;
            witness = a;
        }
    }
    let rho_total = ctx.rho(&d.total());
    Ok(UnitAxiomReport {
        holds: sup == rho_total,
        sup,
        witness,
        rho_total,
    })
}

/// The law of `x1 + x2`: outcomes must be rationals; weights multiply in the ring.
pub fn convolve(m1: &GDistribution, m2: &GDistribution) -> Result<GDistribution> {
    let ctx = m1.context();
    if ctx != m2.context() {
        return Err(Error::InvalidParameter(format!("contexts {ctx} and {} differ", m2.context())));
    }
    if !ctx.has_ring() {
        return Err(Error::NoRingStructure);
    }
    let values = |d: &GDistribution| -> Result<Vec<Rational>> {
        d.outcomes().iter().map(|o| rational::parse_rational(o)).collect()
    };
    let (x1, x2) = (values(m1)?, values(m2)?);
    let mut acc: BTreeMap<Rational, GElement> = BTreeMap::new();
    for (a, wa) in x1.iter().zip(m1.weights()) {
        for (b, wb) in x2.iter().zip(m2.weights()) {
            let w = ctx.mul(wa, wb)?;
            let slot = acc.entry(a + b).or_insert_with(|| ctx.neutral());
            *slot = ctx.add(slot, &w);
        }
    }
    if acc.len() > 64 {
        return Err(Error::InvalidParameter("convolution support exceeds 64 outcomes".into()));
    }
    let (outcomes, weights) = acc.into_iter().map(|(x, w)| (rational::to_text(&x), w)).unzip();
    GDistribution::new(ctx.clone(), outcomes, weights)
}

/// P(B | A) = P(A ∩ B) P(A)^-1.
pub fn conditional(d: &GDistribution, a: u64, b: u64) -> Result<GElement> {
    let ctx = d.context();
    let pa = d.prob(a);
    let inv = ctx.inverse(&pa)?;
    ctx.mul(&d.prob(a & b), &inv)
}
