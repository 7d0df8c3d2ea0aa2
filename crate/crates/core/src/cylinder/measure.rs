use num_traits::Zero;

use super::clopen::{check_digits, Clopen};
use crate::error::{Error, Result};
use crate::padic::{abs_p, PadicAbs};
use crate::prime::Prime;
use crate::rational::{self, Rational};

/// A finitely additive measure on the cylinders of `Z_q`, valued in `Q_p`.
pub trait CylinderMeasure {
    fn q(&self) -> Prime;
    fn p(&self) -> Prime;
    /// μ(U_x) for the cylinder with base word `x`.
    fn mass(&self, word: &[u32]) -> Rational;
    /// Below this depth a cylinder may split into pieces of different norms.
    fn resolution_depth(&self) -> usize {
        0
    }
}

/// μ(U_x) = q^(-l(x)).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniformMeasure {
    q: Prime,
    p: Prime,
}

impl UniformMeasure {
    pub fn new(q: Prime, p: Prime) -> Result<Self> {
        if p == q {
            return Err(Error::InvalidParameter(format!(
                "the uniform measure on Z_{q} is a probabilistic measure in Q_p only for p != q \
                 (|q^-n|_{p} is unbounded)"
            )));
        }
        Ok(UniformMeasure { q, p })
    }
}

impl CylinderMeasure for UniformMeasure {
    fn q(&self) -> Prime {
        self.q
    }
    fn p(&self) -> Prime {
        self.p
    }
    fn mass(&self, word: &[u32]) -> Rational {
        Rational::new(1.into(), self.q.pow(word.len() as u32))
    }
}

/// Arbitrary weights on the depth-`d` cylinders, spread uniformly below them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableMeasure {
    q: Prime,
    p: Prime,
    depth: usize,
    weights: Vec<Rational>,
}

impl TableMeasure {
    /// `weights[j]` is the mass of the depth-`depth` cylinder whose base word
    /// encodes to `j` in little-endian base q.
    pub fn new(q: Prime, p: Prime, depth: usize, weights: Vec<Rational>) -> Result<Self> {
        let expected = q
            .get()
            .checked_pow(depth as u32)
            .filter(|&n| n <= 1 << 20)
            .ok_or_else(|| Error::InvalidParameter("measure table too large".into()))?;
        if weights.len() as u64 != expected {
            return Err(Error::InvalidParameter(format!(
                "expected {expected} weights for depth {depth}, got {}",
                weights.len()
            )));
        }
        Ok(TableMeasure { q, p, depth, weights })
    }

    /// The measure assigning 0 to every set.
    pub fn zero(q: Prime, p: Prime) -> Self {
        TableMeasure {
            q,
            p,
            depth: 0,
            weights: vec![Rational::zero()],
        }
    }

    fn index(&self, word: &[u32]) -> usize {
        word.iter()
            .rev()
            .fold(0usize, |acc, &d| acc * self.q.get() as usize + d as usize)
    }
}

impl CylinderMeasure for TableMeasure {
    fn q(&self) -> Prime {
        self.q
    }
    fn p(&self) -> Prime {
        self.p
    }
    fn mass(&self, word: &[u32]) -> Rational {
        let q = self.q.get() as usize;
        if word.len() >= self.depth {
            let w = &self.weights[self.index(&word[..self.depth])];
            return w / rational::from_big(self.q.pow((word.len() - self.depth) as u32));
        }
        // sum over extensions: indices agreeing with `word` in the low digits
        let stride = q.pow(word.len() as u32);
        let start = self.index(word);
        self.weights[start..].iter().step_by(stride).sum()
    }
    fn resolution_depth(&self) -> usize {
        self.depth
    }
}

fn check_alphabet(m: &impl CylinderMeasure, a: &Clopen) -> Result<()> {
    if m.q() != a.q() {
        return Err(Error::AlphabetMismatch(format!(
            "measure on Z_{} applied to a subset of Z_{}",
            m.q(),
            a.q()
        )));
    }
    Ok(())
}

pub fn measure(m: &impl CylinderMeasure, a: &Clopen) -> Result<Rational> {
    check_alphabet(m, a)?;
    Ok(a.words().iter().map(|w| m.mass(w)).sum())
}

/// Every word of length `depth` extending `word`.
fn extensions(word: &[u32], depth: usize, q: u32) -> Vec<Vec<u32>> {
    let mut out = vec![word.to_vec()];
    for _ in word.len()..depth {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..q).map(move |d| {
                    let mut w = w.clone();
                    w.push(d);
                    w
                })
            })
            .collect();
    }
    out
}

fn max_abs(p: Prime, values: impl IntoIterator<Item = PadicAbs>) -> PadicAbs {
    values
        .into_iter()
        .fold(PadicAbs::zero(p), |a, b| if b > a { b } else { a })
}

/// ‖A‖_μ: the largest |μ(B)|_p over clopen `B ⊆ A`.
///
/// By the ultrametric inequality it suffices to range over the cylinders
/// inside `A`; below the measure's resolution depth those all have the norm
/// of their depth-resolution ancestor.
pub fn measure_norm(m: &impl CylinderMeasure, a: &Clopen) -> Result<PadicAbs> {
    check_alphabet(m, a)?;
    let (p, q, res) = (m.p(), m.q().get() as u32, m.resolution_depth());
    Ok(max_abs(
        p,
        a.words().iter().flat_map(|w| {
            (w.len()..=res.max(w.len()))
                .flat_map(move |d| extensions(w, d, q))
                .map(|x| abs_p(&m.mass(&x), p))
                .collect::<Vec<_>>()
        }),
    ))
}

/// N_μ at any point with this digit prefix: the infimum of ‖U‖_μ over the
/// cylinders containing it.
pub fn n_mu(m: &impl CylinderMeasure, prefix: &[u32]) -> Result<PadicAbs> {
    check_digits(prefix, m.q())?;
    if prefix.len() < m.resolution_depth() {
        return Err(Error::InsufficientData {
            needed: m.resolution_depth(),
            available: prefix.len(),
        });
    }
    let mut best: Option<PadicAbs> = None;
    for j in 0..=prefix.len() {
        let n = measure_norm(m, &Clopen::cylinder(m.q(), &prefix[..j])?)?;
        best = Some(match best {
            Some(b) if b <= n => b,
            _ => n,
        });
    }
    Ok(best.expect("at least the empty prefix"))
}

/// ‖I_A‖ with respect to N_μ, i.e. sup over points of `A` of N_μ.
pub fn indicator_norm(m: &impl CylinderMeasure, a: &Clopen) -> Result<PadicAbs> {
    check_alphabet(m, a)?;
    let depth = a.depth().max(m.resolution_depth());
    let q = m.q().get() as u32;
    let mut out = PadicAbs::zero(m.p());
    for w in a.words() {
        for x in extensions(&w, depth, q) {
            let n = n_mu(m, &x)?;
            if n > out {
                out = n;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use proptest::prelude::*;

    fn pr(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn uniform(q: u64, p: u64) -> UniformMeasure {
        UniformMeasure::new(pr(q), pr(p)).unwrap()
    }

    #[test]
    fn rejects_equal_primes() {
        let e = UniformMeasure::new(pr(3), pr(3)).unwrap_err();
        assert!(e.to_string().contains("p != q"), "{e}");
    }

    #[test]
    fn uniform_masses() {
        let m = uniform(2, 3);
        let c = |s: &str| Clopen::parse(s, pr(2)).unwrap();
        assert_eq!(measure(&m, &c("01")).unwrap(), frac(1, 4));
        assert_eq!(measure(&m, &c("0;1")).unwrap(), int(1));
        assert_eq!(measure(&m, &c("")).unwrap(), int(0));
        assert_eq!(measure_norm(&m, &c("011;1")).unwrap(), PadicAbs::one(pr(3)));
        assert!(measure_norm(&m, &c("")).unwrap().is_zero());
        assert_eq!(measure_norm(&m, &Clopen::whole(pr(2))).unwrap(), PadicAbs::one(pr(3)));
    }

    #[test]
    fn n_mu_is_one_for_uniform() {
        let m = uniform(2, 5);
        for depth in 0..=10usize {
            let prefix: Vec<u32> = (0..depth).map(|i| (i % 2) as u32).collect();
            assert_eq!(n_mu(&m, &prefix).unwrap(), PadicAbs::one(pr(5)));
        }
        let z = TableMeasure::zero(pr(2), pr(5));
        assert!(n_mu(&z, &[1, 0, 1]).unwrap().is_zero());
        assert!(measure_norm(&z, &Clopen::whole(pr(2))).unwrap().is_zero());
    }

    #[test]
    fn table_measure_norms() {
        // weights 3, -2 on U_(0), U_(1) in Q_3: total 1 but ‖U_(0)‖ = 1/3
        let m = TableMeasure::new(pr(2), pr(3), 1, vec![int(3), int(-2)]).unwrap();
        let whole = Clopen::whole(pr(2));
        assert_eq!(measure(&m, &whole).unwrap(), int(1));
        assert_eq!(m.mass(&[]), int(1));
        assert_eq!(m.mass(&[0, 1]), frac(3, 2));
        assert_eq!(measure_norm(&m, &Clopen::cylinder(pr(2), &[0]).unwrap()).unwrap(), PadicAbs::power(pr(3), -1));
        assert_eq!(measure_norm(&m, &whole).unwrap(), PadicAbs::one(pr(3)));
        assert!(matches!(n_mu(&m, &[]), Err(Error::InsufficientData { .. })));
        assert_eq!(n_mu(&m, &[0, 1]).unwrap(), PadicAbs::power(pr(3), -1));
        for s in ["0", "1", "0;1", "01;1", ""] {
            let a = Clopen::parse(s, pr(2)).unwrap();
            assert_eq!(measure_norm(&m, &a).unwrap(), indicator_norm(&m, &a).unwrap(), "{s}");
        }
    }

    pub(crate) fn clopen_strategy(q: u64, max_depth: usize) -> impl Strategy<Value = Clopen> {
        let word = prop::collection::vec(0..q as u32, 0..=max_depth);
        prop::collection::vec(word, 0..6)
            .prop_map(move |ws| Clopen::from_words(Prime::new(q).unwrap(), &ws).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn additivity(a in clopen_strategy(3, 4), b in clopen_strategy(3, 4)) {
            let m = uniform(3, 2);
            let b = b.difference(&a).unwrap();
            let sum = measure(&m, &a).unwrap() + measure(&m, &b).unwrap();
            prop_assert_eq!(measure(&m, &a.union(&b).unwrap()).unwrap(), sum);
        }

        #[test]
        fn bounded(a in clopen_strategy(2, 6)) {
            let m = uniform(2, 3);
            prop_assert!(abs_p(&measure(&m, &a).unwrap(), pr(3)) <= PadicAbs::one(pr(3)));
            prop_assert_eq!(measure_norm(&m, &a).unwrap(), indicator_norm(&m, &a).unwrap());
        }

        #[test]
        fn normal_form_unique(a in clopen_strategy(2, 5), b in clopen_strategy(2, 5)) {
            prop_assert_eq!(a.normalize().normalize(), a.normalize());
            // membership on every prefix of depth max+1 determines the normal form
            let d = a.depth().max(b.depth()) + 1;
            let same = extensions(&[], d, 2)
                .iter()
                .all(|x| a.contains_prefix(x) == b.contains_prefix(x));
            prop_assert_eq!(same, a == b);
        }

        #[test]
        fn boolean_laws(a in clopen_strategy(3, 3), b in clopen_strategy(3, 3)) {
            let lhs = a.union(&b).unwrap().complement();
            let rhs = a.complement().intersect(&b.complement()).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert!(a.union(&a.complement()).unwrap().is_whole());
            prop_assert_eq!(a.complement().complement(), a.clone());
            let words = a.words();
            let mut sorted = words.clone();
            sorted.sort();
            prop_assert_eq!(words, sorted);
        }
    }
}
