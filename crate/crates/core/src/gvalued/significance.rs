use num_traits::Zero;

use super::context::{GElement, GroupContext};
use crate::error::{Error, Result};
use crate::frequency::{Collective, SequenceSelector};
use crate::limit::{critical_region, RandomnessOptions};
use crate::padic::PadicAbs;
use crate::rational::{self, Rational};

/// V_ε = {x : ρ(0, x) < ε}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignificanceNeighborhood {
    context: GroupContext,
    eps: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    PracticallyImpossible,
    Significant,
}

impl SignificanceNeighborhood {
    pub fn new(context: GroupContext, eps: Rational) -> Result<Self> {
        if eps <= Rational::zero() {
            return Err(Error::InvalidParameter("ε must be positive".into()));
        }
        Ok(SignificanceNeighborhood { context, eps })
    }

    pub fn eps(&self) -> &Rational {
        &self.eps
    }

    pub fn context(&self) -> &GroupContext {
        &self.context
    }

    pub fn classify(&self, value: &GElement) -> Classification {
        if self.context.rho(value) < self.eps {
            Classification::PracticallyImpossible
        } else {
            Classification::Significant
        }
    }
}

pub fn significance_classify(value: &GElement, v: &SignificanceNeighborhood) -> Classification {
    v.classify(value)
}

/// A critical region Ω^(V): its probability and a membership test.
pub struct CriticalRegion<T: ?Sized> {
    pub name: String,
    pub level: SignificanceNeighborhood,
    pub prob: GElement,
    member: Box<dyn Fn(&T) -> Result<bool> + Send + Sync>,
}

impl<T: ?Sized> std::fmt::Debug for CriticalRegion<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CriticalRegion")
            .field("name", &self.name)
            .field("level", &self.level)
            .field("prob", &self.prob)
            .finish()
    }
}

impl<T: ?Sized> CriticalRegion<T> {
    /// Fails with `RegionNotSignificant` unless P(region) ∈ V.
    pub fn new(
        name: impl Into<String>,
        level: SignificanceNeighborhood,
        prob: GElement,
        member: impl Fn(&T) -> Result<bool> + Send + Sync + 'static,
    ) -> Result<Self> {
        let name = name.into();
        level.context.check(&prob)?;
        if level.classify(&prob) != Classification::PracticallyImpossible {
            return Err(Error::RegionNotSignificant(format!(
                "P({name}) = {} is not inside V with ε = {}",
                level.context.format(&prob),
                rational::to_text(&level.eps)
            )));
        }
        Ok(CriticalRegion {
            name,
            level,
            prob,
            member: Box::new(member),
        })
    }

    pub fn contains(&self, x: &T) -> Result<bool> {
        (self.member)(x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TestOutcome {
    /// Rejected; `region` is the one with the smallest ε that contains ω.
    Rejected { region: String, eps: Rational },
    NotRejected,
}

/// Runs every region against an outcome and reports the strongest rejection.
pub struct CriticalRegionTest<T: ?Sized> {
    regions: Vec<CriticalRegion<T>>,
}

impl<T: ?Sized> CriticalRegionTest<T> {
    pub fn new(regions: Vec<CriticalRegion<T>>) -> Self {
        CriticalRegionTest { regions }
    }

    pub fn run(&self, x: &T) -> Result<TestOutcome> {
        let mut best: Option<&CriticalRegion<T>> = None;
        for r in &self.regions {
            if r.contains(x)? && best.is_none_or(|b| r.level.eps < b.level.eps) {
                best = Some(r);
            }
        }
        Ok(match best {
            Some(r) => TestOutcome::Rejected {
                region: r.name.clone(),
                eps: r.level.eps.clone(),
            },
            None => TestOutcome::NotRejected,
        })
    }
}

/// The sphere test's region Ω^ε as a p-adic critical region over binary collectives.
pub fn sphere_test_region(selector: &SequenceSelector, opts: &RandomnessOptions) -> Result<CriticalRegion<Collective>> {
    let region = critical_region(selector, opts)?;
    let p = region.prime;
    let union = region
        .union
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("checkpoints too large for the exact region probability".into()))?
        .union
        .clone();
    let ctx = GroupContext::padic(p);
    let eps = PadicAbs::power(p, -opts.eps_exp).to_rational();
    let level = SignificanceNeighborhood::new(ctx.clone(), eps)?;
    let name = format!("sphere(p={p}, l={}, r={}, k>={})", opts.l, opts.r, region.k_eps);
    CriticalRegion::new(name, level, ctx.scalar(union), move |omega: &Collective| region.contains(omega))
}
