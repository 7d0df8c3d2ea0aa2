use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::padic::abs_p;
use crate::prime::Prime;
use crate::rational::{self, Rational};

/// One rational coordinate with its metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    /// ρ(0, x) = |x|.
    Real,
    /// ρ(0, x) = |x|_p.
    Padic(Prime),
}

impl Metric {
    fn norm(self, x: &Rational) -> Rational {
        match self {
            Metric::Real => x.abs(),
            Metric::Padic(p) => abs_p(x, p).to_rational(),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Real => f.write_str("real"),
            Metric::Padic(p) => write!(f, "padic:{p}"),
        }
    }
}

/// A metrized abelian group of rational tuples: ℚ with the real or a p-adic
/// metric, or a finite product of those (max metric). Multiplication is
/// coordinatewise and can be switched off to model a bare group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupContext {
    metrics: Vec<Metric>,
    ring: bool,
}

/// An element of a [`GroupContext`]: one rational per coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GElement(pub Vec<Rational>);

impl GroupContext {
    pub fn real() -> Self {
        GroupContext {
            metrics: vec![Metric::Real],
            ring: true,
        }
    }

    pub fn padic(p: Prime) -> Self {
        GroupContext {
            metrics: vec![Metric::Padic(p)],
            ring: true,
        }
    }

    pub fn product(parts: &[GroupContext]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidParameter("a product needs at least one factor".into()));
        }
        Ok(GroupContext {
            metrics: parts.iter().flat_map(|c| c.metrics.iter().copied()).collect(),
            ring: parts.iter().all(|c| c.ring),
        })
    }

    /// The same group with its multiplication forgotten.
    pub fn without_ring(mut self) -> Self {
        self.ring = false;
        self
    }

    pub fn has_ring(&self) -> bool {
        self.ring
    }

    pub fn arity(&self) -> usize {
        self.metrics.len()
    }

    pub fn metrics(&self) -> &[Metric] {
        &self.metrics
    }

    pub fn neutral(&self) -> GElement {
        GElement(vec![Rational::zero(); self.arity()])
    }

    pub fn unit(&self) -> GElement {
        GElement(vec![Rational::one(); self.arity()])
    }

    /// Embeds a rational diagonally.
    pub fn scalar(&self, x: Rational) -> GElement {
        GElement(vec![x; self.arity()])
    }

    pub fn check(&self, x: &GElement) -> Result<()> {
        if x.0.len() != self.arity() {
            return Err(Error::InvalidParameter(format!(
                "element with {} coordinates in a context of arity {}",
                x.0.len(),
                self.arity()
            )));
        }
        Ok(())
    }

    pub fn add(&self, a: &GElement, b: &GElement) -> GElement {
        GElement(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect())
    }

    pub fn neg(&self, a: &GElement) -> GElement {
        GElement(a.0.iter().map(|x| -x).collect())
    }

    pub fn sum<'a>(&self, items: impl IntoIterator<Item = &'a GElement>) -> GElement {
        items.into_iter().fold(self.neutral(), |acc, x| self.add(&acc, x))
    }

    fn require_ring(&self) -> Result<()> {
        if !self.ring {
            return Err(Error::NoRingStructure);
        }
        Ok(())
    }

    pub fn mul(&self, a: &GElement, b: &GElement) -> Result<GElement> {
        self.require_ring()?;
        Ok(GElement(a.0.iter().zip(&b.0).map(|(x, y)| x * y).collect()))
    }

    pub fn is_invertible(&self, a: &GElement) -> bool {
        self.ring && a.0.iter().all(|x| !x.is_zero())
    }

    pub fn inverse(&self, a: &GElement) -> Result<GElement> {
        self.require_ring()?;
        if !self.is_invertible(a) {
            return Err(Error::NotInvertible(self.format(a)));
        }
        Ok(GElement(a.0.iter().map(|x| x.recip()).collect()))
    }

    /// ρ(0, x): the max over coordinates of each coordinate's norm.
    pub fn rho(&self, x: &GElement) -> Rational {
        self.metrics
            .iter()
            .zip(&x.0)
            .map(|(m, v)| m.norm(v))
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn format(&self, x: &GElement) -> String {
        let parts: Vec<String> = x.0.iter().map(rational::to_fraction_string).collect();
        parts.join(",")
    }

    /// Parses `"n/d"`, or comma-separated coordinates for a product.
    pub fn parse_element(&self, s: &str) -> Result<GElement> {
        let x = GElement(s.split(',').map(|t| rational::parse_rational(t.trim())).collect::<Result<_>>()?);
        self.check(&x)?;
        Ok(x)
    }
}

impl fmt::Display for GroupContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.metrics.len() == 1 {
            write!(f, "{}", self.metrics[0])?;
        } else {
            let parts: Vec<String> = self.metrics.iter().map(|m| m.to_string()).collect();
            write!(f, "product({})", parts.join(","))?;
        }
        if !self.ring {
            f.write_str("+group")?;
        }
        Ok(())
    }
}

impl FromStr for GroupContext {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (body, ring) = match s.strip_suffix("+group") {
            Some(b) => (b, false),
            None => (s, true),
        };
        let metric = |t: &str| -> Result<Metric> {
            match t.trim() {
                "real" => Ok(Metric::Real),
                t => match t.strip_prefix("padic:") {
                    Some(p) => Ok(Metric::Padic(p.parse()?)),
                    None => Err(Error::Parse(format!("unknown context {t:?}"))),
                },
            }
        };
        let metrics = match body.strip_prefix("product(").and_then(|b| b.strip_suffix(')')) {
            Some(inner) => inner.split(',').map(metric).collect::<Result<Vec<_>>>()?,
            None => vec![metric(body)?],
        };
        Ok(GroupContext { metrics, ring })
    }
}
