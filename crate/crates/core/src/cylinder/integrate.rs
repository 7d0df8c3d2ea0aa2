use std::fmt;

use num_traits::Zero;
use serde_json::json;

use super::clopen::Clopen;
use super::measure::{measure, measure_norm, CylinderMeasure};
use crate::error::{Error, Result};
use crate::padic::{abs_p, PadicAbs, PadicApprox, Valuation, DEFAULT_PRECISION};
use crate::prime::Prime;
use crate::rational::{self, Rational};

/// `Σ c_k I_{A_k}` over pairwise disjoint clopen pieces; 0 elsewhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepFunction {
    q: Prime,
    pieces: Vec<(Clopen, Rational)>,
}

impl StepFunction {
    pub fn new(q: Prime, pieces: Vec<(Clopen, Rational)>) -> Result<Self> {
        for (i, (a, _)) in pieces.iter().enumerate() {
            if a.q() != q {
                return Err(Error::AlphabetMismatch(format!("piece over Z_{} in a step function on Z_{q}", a.q())));
            }
            for (b, _) in &pieces[..i] {
                if !a.is_disjoint(b)? {
                    return Err(Error::OverlappingPieces(format!("{a} meets {b}")));
                }
            }
        }
        Ok(StepFunction { q, pieces })
    }

    pub fn q(&self) -> Prime {
        self.q
    }

    pub fn pieces(&self) -> &[(Clopen, Rational)] {
        &self.pieces
    }

    /// The value on every point with this prefix, if the prefix decides it.
    pub fn eval_prefix(&self, prefix: &[u32]) -> Option<Rational> {
        let mut undecided = false;
        for (a, c) in &self.pieces {
            match a.contains_prefix(prefix) {
                Some(true) => return Some(c.clone()),
                Some(false) => {}
                None => undecided = true,
            }
        }
        (!undecided).then(Rational::zero)
    }

    fn depth(&self) -> usize {
        self.pieces.iter().map(|(a, _)| a.depth()).max().unwrap_or(0)
    }
}

pub fn integrate_step(m: &impl CylinderMeasure, f: &StepFunction) -> Result<Rational> {
    let mut total = Rational::zero();
    for (a, c) in &f.pieces {
        total += c * measure(m, a)?;
    }
    Ok(total)
}

/// `max_k |c_k|_p ‖A_k‖_μ`, the norm of a step function.
pub fn step_norm(m: &impl CylinderMeasure, f: &StepFunction) -> Result<PadicAbs> {
    let mut out = PadicAbs::zero(m.p());
    for (a, c) in &f.pieces {
        let n = abs_p(c, m.p()) * measure_norm(m, a)?;
        if n > out {
            out = n;
        }
    }
    Ok(out)
}

type Evaluator = Box<dyn Fn(&[u32]) -> Rational + Send + Sync>;
type Oscillation = Box<dyn Fn(usize) -> PadicAbs + Send + Sync>;

/// A continuous map `Z_q -> Q_p`, known through its values on digit prefixes
/// and a declared bound δ(n) on its variation over depth-n cylinders.
pub struct ContinuousMap {
    q: Prime,
    evaluator: Evaluator,
    oscillation: Option<Oscillation>,
}

impl fmt::Debug for ContinuousMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContinuousMap")
            .field("q", &self.q)
            .field("oscillation", &self.oscillation.is_some())
            .finish()
    }
}

impl ContinuousMap {
    pub fn new(q: Prime, evaluator: impl Fn(&[u32]) -> Rational + Send + Sync + 'static) -> Self {
        ContinuousMap {
            q,
            evaluator: Box::new(evaluator),
            oscillation: None,
        }
    }

    pub fn with_oscillation(mut self, delta: impl Fn(usize) -> PadicAbs + Send + Sync + 'static) -> Self {
        self.oscillation = Some(Box::new(delta));
        self
    }

    pub fn constant(q: Prime, p: Prime, c: Rational) -> Self {
        Self::new(q, move |_| c.clone()).with_oscillation(move |_| PadicAbs::zero(p))
    }

    /// A step function viewed as a continuous map; exact from its depth on.
    pub fn from_step(f: StepFunction, p: Prime) -> Self {
        let depth = f.depth();
        let bound = f
            .pieces
            .iter()
            .map(|(_, c)| abs_p(c, p))
            .fold(PadicAbs::zero(p), |a, b| if b > a { b } else { a });
        let q = f.q;
        let eval = move |x: &[u32]| f.eval_prefix(x).unwrap_or_else(Rational::zero);
        Self::new(q, eval).with_oscillation(move |n| if n >= depth { PadicAbs::zero(p) } else { bound })
    }

    /// `x = Σ d_j q^j  ↦  Σ d_j p^j`, with δ(n) = p^-n.
    pub fn digit_weight(q: Prime, p: Prime) -> Self {
        let base = Rational::from_integer(p.to_bigint());
        Self::new(q, move |x: &[u32]| {
            x.iter()
                .rev()
                .fold(Rational::zero(), |acc, &d| acc * &base + Rational::from_integer(d.into()))
        })
        .with_oscillation(move |n| PadicAbs::power(p, -(n as i64)))
    }

    pub fn eval(&self, prefix: &[u32]) -> Rational {
        (self.evaluator)(prefix)
    }
}

/// A depth-n Riemann sum with its certified distance to the integral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Integral {
    pub depth: usize,
    pub riemann_sum: Rational,
    /// The integral, known modulo the error bound.
    pub value: PadicApprox,
    pub error_bound: PadicAbs,
    /// `max_x |f(x)|_p ‖U_x‖_μ` over the depth-n cylinders.
    pub norm_bound: PadicAbs,
    pub norm_ok: bool,
}

impl Integral {
    /// Valuation of the error bound: the integral is known modulo `p^error_exponent`.
    pub fn error_exponent(&self) -> Valuation {
        self.error_bound.valuation()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "depth": self.depth,
            "value": rational::to_fraction_string(&self.riemann_sum),
            "error_exponent": self.error_exponent(),
        })
    }
}

const MAX_CELLS: u64 = 1 << 22;

/// Riemann sum of `f` over all depth-`depth` cylinders, in lexicographic order.
pub fn integrate_continuous(
    m: &impl CylinderMeasure,
    f: &ContinuousMap,
    depth: usize,
) -> Result<Integral> {
    let delta = f.oscillation.as_ref().ok_or_else(|| {
        Error::OscillationMissing("integration needs a declared oscillation bound".into())
    })?;
    if depth == 0 {
        return Err(Error::InvalidParameter("depth must be at least 1".into()));
    }
    if m.q() != f.q {
        return Err(Error::AlphabetMismatch(format!("map on Z_{} with a measure on Z_{}", f.q, m.q())));
    }
    let (p, q) = (m.p(), m.q().get());
    q.checked_pow(depth as u32)
        .filter(|&n| n <= MAX_CELLS)
        .ok_or_else(|| Error::InvalidParameter(format!("{q}^{depth} cells is too many")))?;

    let mut sum = Rational::zero();
    let mut norm_bound = PadicAbs::zero(p);
    let mut word = vec![0u32; depth];
    loop {
        let mass = m.mass(&word);
        let fx = f.eval(&word);
        let local = abs_p(&fx, p) * measure_norm(m, &Clopen::cylinder(m.q(), &word)?)?;
        if local > norm_bound {
            norm_bound = local;
        }
        sum += fx * mass;
        // lexicographic successor
        match word.iter().rposition(|&d| (d as u64) + 1 < q) {
            Some(i) => {
                word[i] += 1;
                word[i + 1..].iter_mut().for_each(|d| *d = 0);
            }
            None => break,
        }
    }

    let d = delta(depth);
    if d.prime() != p {
        return Err(Error::InvalidParameter("oscillation bound uses a different prime".into()));
    }
    let error_bound = d * measure_norm(m, &Clopen::whole(m.q()))?;
    let value = match error_bound.valuation() {
        Valuation::Infinite => PadicApprox::from_rational(&sum, p, DEFAULT_PRECISION),
        Valuation::Finite(e) => PadicApprox::from_rational_abs(&sum, p, e),
    };
    let norm_ok = abs_p(&sum, p) <= norm_bound;
    Ok(Integral {
        depth,
        riemann_sum: sum,
        value,
        error_bound,
        norm_bound,
        norm_ok,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainReport {
    pub intersection_empty: bool,
    pub contains_empty: bool,
}

/// Checks a finite decreasing chain `A_1 ⊇ A_2 ⊇ ...`. A shrinking clopen
/// family with empty intersection always contains ∅ (compactness), which is
/// why the continuity axiom is automatic on the clopen field.
pub fn check_shrinking_chain(chain: &[Clopen]) -> Result<ChainReport> {
    for w in chain.windows(2) {
        if !w[1].is_subset(&w[0])? {
            return Err(Error::InvalidParameter("chain is not decreasing".into()));
        }
    }
    Ok(ChainReport {
        intersection_empty: chain.last().is_none_or(Clopen::is_empty),
        contains_empty: chain.iter().any(Clopen::is_empty),
    })
}
