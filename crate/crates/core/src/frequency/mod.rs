//! Frequency probabilities of label collectives along index sequences that
//! converge in a chosen topology (p-adic or real).
//!
//! No finite computation certifies a limit. Convergence is *detected* with a
//! Cauchy window: the last `window` consecutive gaps between successive
//! frequencies must all be small (p-adic valuation at least `threshold`, or,
//! for the real topology, absolute value at most `10^-threshold`).

mod collective;
mod selector;

use std::io::Write;

use num_traits::{One, Signed};

pub use collective::{Alphabet, Collective, Generator, LabelSet};
pub use selector::{RangeBall, Scheme, SequenceSelector, Term};

use crate::error::{Error, Result};
use crate::padic::{vp, PadicApprox, Valuation};
use crate::prime::Prime;
use crate::rational::{self, Rational};

/// ν_N(A) = n(A, N) / N.
pub fn relative_frequency(c: &Collective, set: LabelSet, n: usize) -> Result<Rational> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let count = c.count(set, n)?;
    Ok(rational::frac(count as i64, n as i64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Padic(Prime),
    Real,
}

/// Distance between successive frequencies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gap {
    Valuation(Valuation),
    Absolute(Rational),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRow {
    pub k: u32,
    pub n: u64,
    pub value: Rational,
    pub gap: Option<Gap>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyTrace {
    pub topology: Topology,
    pub rows: Vec<TraceRow>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Limit {
    Padic(PadicApprox),
    Real(Rational),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// The Cauchy window held; the value is the last frequency.
    ConvergenceDetected(Limit),
    NoLimitDetected,
    /// The window held but the value lies outside the selector's range ball.
    RangeViolation(Rational),
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::ConvergenceDetected(_) => "ConvergenceDetected",
            Verdict::NoLimitDetected => "NoLimitDetected",
            Verdict::RangeViolation(_) => "RangeViolation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitOutcome {
    pub verdict: Verdict,
    pub trace: FrequencyTrace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LimitOptions {
    pub kmax: u32,
    pub threshold: i64,
    pub window: usize,
    /// Defaults to the selector's p-adic topology.
    pub topology: Option<Topology>,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions {
            kmax: 8,
            threshold: 8,
            window: 3,
            topology: None,
        }
    }
}

impl LimitOptions {
    pub fn with_kmax(kmax: u32) -> Self {
        LimitOptions {
            kmax,
            ..Self::default()
        }
    }
}

/// Limit of ν_{N_k}(A) along the selector.
pub fn s_probability(
    c: &Collective,
    set: LabelSet,
    s: &SequenceSelector,
    opts: &LimitOptions,
) -> Result<LimitOutcome> {
    check_window(opts)?;
    let values = s
        .terms(opts.kmax)?
        .into_iter()
        .map(|t| Ok((t, relative_frequency(c, set, t.n as usize)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(detect_limit(values, s, opts))
}

/// Limit of ν_{N_k}(A ∩ B) / ν_{N_k}(A) along the selector.
pub fn conditional_s_probability(
    c: &Collective,
    given: LabelSet,
    event: LabelSet,
    s: &SequenceSelector,
    opts: &LimitOptions,
) -> Result<LimitOutcome> {
    check_window(opts)?;
    let both = given.intersect(event);
    let values = s
        .terms(opts.kmax)?
        .into_iter()
        .map(|t| {
            let counts = c.counts(&[given, both], t.n as usize)?;
            if counts[0] == 0 {
                return Err(Error::ConditioningOnNull(t.n));
            }
            Ok((t, rational::frac(counts[1] as i64, counts[0] as i64)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(detect_limit(values, s, opts))
}

fn check_window(opts: &LimitOptions) -> Result<()> {
    if opts.window == 0 || (opts.kmax as usize) < opts.window + 1 {
        return Err(Error::InvalidParameter(format!(
            "kmax ({}) must be at least window + 1 ({})",
            opts.kmax,
            opts.window + 1
        )));
    }
    Ok(())
}

fn gap_small(g: &Gap, threshold: i64) -> bool {
    match g {
        Gap::Valuation(v) => v.at_least(threshold),
        Gap::Absolute(a) => {
            let scale = rational::from_big(num_traits::pow(10.into(), threshold.max(0) as usize));
            a * scale <= Rational::one()
        }
    }
}

fn detect_limit(values: Vec<(Term, Rational)>, s: &SequenceSelector, opts: &LimitOptions) -> LimitOutcome {
    let topology = opts.topology.unwrap_or(Topology::Padic(s.prime()));
    let mut rows: Vec<TraceRow> = Vec::with_capacity(values.len());
    for (t, value) in values {
        let gap = rows.last().map(|prev| {
            let d = &value - &prev.value;
            match topology {
                Topology::Padic(p) => Gap::Valuation(vp(&d, p)),
                Topology::Real => Gap::Absolute(d.abs()),
            }
        });
        rows.push(TraceRow {
            k: t.k,
            n: t.n,
            value,
            gap,
        });
    }
    let window_ok = rows.len() > opts.window
        && rows[rows.len() - opts.window..]
            .iter()
            .all(|r| r.gap.as_ref().is_some_and(|g| gap_small(g, opts.threshold)));
    let verdict = if !window_ok {
        Verdict::NoLimitDetected
    } else {
        let last = rows.last().expect("nonempty").value.clone();
        match topology {
            Topology::Padic(p) => {
                if s.range_ball().contains(&last) {
                    let precision = opts.threshold.max(1) as u32;
                    Verdict::ConvergenceDetected(Limit::Padic(PadicApprox::from_rational(&last, p, precision)))
                } else {
                    Verdict::RangeViolation(last)
                }
            }
            Topology::Real => Verdict::ConvergenceDetected(Limit::Real(last)),
        }
    };
    LimitOutcome {
        verdict,
        trace: FrequencyTrace { topology, rows },
    }
}

impl FrequencyTrace {
    fn gap_column(&self) -> &'static str {
        match self.topology {
            Topology::Real => "abs_gap",
            Topology::Padic(_) => "vp_gap",
        }
    }

    fn records(&self) -> impl Iterator<Item = [String; 5]> + '_ {
        self.rows.iter().map(|r| {
            let gap = match &r.gap {
                None => String::new(),
                Some(Gap::Valuation(v)) => v.to_string(),
                Some(Gap::Absolute(a)) => rational::to_fraction_string(a),
            };
            [
                r.k.to_string(),
                r.n.to_string(),
                r.value.numer().to_string(),
                r.value.denom().to_string(),
                gap,
            ]
        })
    }

    /// CSV with columns `k,N_k,nu_num,nu_den,vp_gap` (`abs_gap` for the real topology).
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(e.to_string());
        out.write_record(["k", "N_k", "nu_num", "nu_den", self.gap_column()])
            .map_err(io)?;
        for rec in self.records() {
            out.write_record(&rec).map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }

    /// One JSON object per row, same fields as the CSV; the first row has a null gap.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for (rec, row) in self.records().zip(&self.rows) {
            let mut obj = serde_json::Map::new();
            obj.insert("k".into(), row.k.into());
            obj.insert("N_k".into(), row.n.into());
            obj.insert("nu_num".into(), rec[2].clone().into());
            obj.insert("nu_den".into(), rec[3].clone().into());
            let gap = if row.gap.is_some() {
                serde_json::Value::String(rec[4].clone())
            } else {
                serde_json::Value::Null
            };
            obj.insert(self.gap_column().into(), gap);
            writeln!(w, "{}", serde_json::Value::Object(obj))?;
        }
        Ok(())
    }
}

/// Parses a CSV trace written by [`FrequencyTrace::write_csv`] back into rows.
pub fn read_trace_csv(text: &str, topology: Topology) -> Result<Vec<TraceRow>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let field = |i: usize| rec.get(i).ok_or_else(|| Error::Parse("short CSV row".into()));
        let num = |s: &str| s.parse::<u64>().map_err(|_| Error::Parse(format!("bad integer {s:?}")));
        let value = rational::parse_rational(&format!("{}/{}", field(2)?, field(3)?))?;
        let gap_text = field(4)?;
        let gap = if gap_text.is_empty() {
            None
        } else {
            Some(match topology {
                Topology::Padic(_) => Gap::Valuation(gap_text.parse()?),
                Topology::Real => Gap::Absolute(rational::parse_rational(gap_text)?),
            })
        };
        rows.push(TraceRow {
            k: num(field(0)?)? as u32,
            n: num(field(1)?)?,
            value,
            gap,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use proptest::prelude::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn alternating() -> Collective {
        Collective::generated(Alphabet::binary(), Generator::Alternating).unwrap()
    }

    #[test]
    fn alternating_frequencies() {
        let c = alternating();
        let one = LabelSet::of(&[1]);
        assert_eq!(relative_frequency(&c, one, 10).unwrap(), frac(1, 2));
        assert_eq!(relative_frequency(&c, one, 5).unwrap(), frac(2, 5));
        assert_eq!(relative_frequency(&c, c.alphabet().all(), 7).unwrap(), int(1));
    }

    #[test]
    fn insufficient_data() {
        let c = Collective::parse(Alphabet::binary(), b"0101").unwrap();
        let e = relative_frequency(&c, LabelSet::of(&[1]), 5).unwrap_err();
        assert_eq!(e, Error::InsufficientData { needed: 5, available: 4 });
    }

    #[test]
    fn even_indices_converge_to_one_half() {
        let s = SequenceSelector::affine(p(3), 2, 2).unwrap();
        let out = s_probability(&alternating(), LabelSet::of(&[1]), &s, &LimitOptions::with_kmax(6)).unwrap();
        match &out.verdict {
            Verdict::ConvergenceDetected(Limit::Padic(x)) => {
                assert!(x.agrees_with(&PadicApprox::from_rational(&frac(1, 2), p(3), 8)).unwrap());
                assert_eq!(x.precision(), 8);
            }
            v => panic!("unexpected {v:?}"),
        }
        assert!(out.trace.rows.iter().all(|r| r.value == frac(1, 2)));
        assert!(out.trace.rows[1..].iter().all(|r| r.gap == Some(Gap::Valuation(Valuation::Infinite))));
    }

    #[test]
    fn powers_of_three_have_no_limit() {
        let s = SequenceSelector::power(p(3), 1).unwrap();
        let out = s_probability(&alternating(), LabelSet::of(&[1]), &s, &LimitOptions::with_kmax(6)).unwrap();
        assert_eq!(out.verdict, Verdict::NoLimitDetected);
        for r in &out.trace.rows {
            // ν = (3^k - 1) / (2 * 3^k)
            let pk = 3i64.pow(r.k);
            assert_eq!(r.value, frac(pk - 1, 2 * pk));
            if let Some(g) = &r.gap {
                assert_eq!(g, &Gap::Valuation(Valuation::Finite(-(r.k as i64))));
            }
        }
    }

    #[test]
    fn whole_space_converges_to_one() {
        let c = Collective::generated(Alphabet::binary(), Generator::Seeded(3)).unwrap();
        let s = SequenceSelector::truncation(p(5), int(-1)).unwrap();
        let out = s_probability(&c, c.alphabet().all(), &s, &LimitOptions::with_kmax(5)).unwrap();
        match out.verdict {
            Verdict::ConvergenceDetected(Limit::Padic(x)) => assert_eq!(x.representative(), int(1)),
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn window_precondition() {
        let s = SequenceSelector::power(p(3), 1).unwrap();
        let opts = LimitOptions { kmax: 3, window: 3, ..LimitOptions::default() };
        assert!(s_probability(&alternating(), LabelSet::of(&[1]), &s, &opts).is_err());
    }

    #[test]
    fn conditional_frequencies() {
        let c = Collective::generated(Alphabet::new("012").unwrap(), Generator::Periodic(vec![0, 1, 2])).unwrap();
        let a = LabelSet::of(&[1, 2]);
        let s = SequenceSelector::power(p(3), 1).unwrap();
        let opts = LimitOptions::with_kmax(5);
        let out = conditional_s_probability(&c, a, LabelSet::of(&[1]), &s, &opts).unwrap();
        assert!(out.trace.rows.iter().all(|r| r.value == frac(1, 2)));
        let sup = conditional_s_probability(&c, a, c.alphabet().all(), &s, &opts).unwrap();
        assert!(sup.trace.rows.iter().all(|r| r.value == int(1)));
        let disjoint = conditional_s_probability(&c, a, LabelSet::of(&[0]), &s, &opts).unwrap();
        assert!(disjoint.trace.rows.iter().all(|r| *r.value.numer() == 0.into()));
        let zeros = Collective::parse(Alphabet::binary(), &[b'0'; 300]).unwrap();
        let e = conditional_s_probability(&zeros, LabelSet::of(&[1]), LabelSet::of(&[1]), &s, &opts).unwrap_err();
        assert_eq!(e, Error::ConditioningOnNull(3));
    }

    #[test]
    fn real_topology() {
        let s = SequenceSelector::power(p(3), 1).unwrap();
        let opts = LimitOptions {
            kmax: 12,
            threshold: 4,
            window: 3,
            topology: Some(Topology::Real),
        };
        let out = s_probability(&alternating(), LabelSet::of(&[1]), &s, &opts).unwrap();
        // |gap| = 1/3^k <= 10^-4 from k = 9
        assert!(matches!(out.verdict, Verdict::ConvergenceDetected(Limit::Real(_))));
        let p3 = s_probability(&alternating(), LabelSet::of(&[1]), &s, &LimitOptions { topology: None, ..opts }).unwrap();
        assert_eq!(p3.verdict, Verdict::NoLimitDetected);
    }

    #[test]
    fn csv_round_trip() {
        let s = SequenceSelector::power(p(3), 1).unwrap();
        let out = s_probability(&alternating(), LabelSet::of(&[1]), &s, &LimitOptions::with_kmax(5)).unwrap();
        let mut buf = Vec::new();
        out.trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("k,N_k,nu_num,nu_den,vp_gap\n1,3,1,3,\n"), "{text}");
        assert_eq!(read_trace_csv(&text, out.trace.topology).unwrap(), out.trace.rows);
        let mut jl = Vec::new();
        out.trace.write_jsonl(&mut jl).unwrap();
        let first: serde_json::Value = serde_json::from_str(String::from_utf8(jl).unwrap().lines().nth(1).unwrap()).unwrap();
        assert_eq!(first["vp_gap"], "-2");
    }

    fn collective_strategy() -> impl Strategy<Value = (Vec<u8>, usize)> {
        (1usize..6).prop_flat_map(|q| (proptest::collection::vec(0u8..q as u8, 1..200), Just(q)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn finite_n_identities((labels, q) in collective_strategy(), a in any::<u64>(), b in any::<u64>(), n_frac in 0.0f64..1.0) {
            let alphabet = Alphabet::new(&"abcdef"[..q]).unwrap();
            let all = alphabet.all();
            let c = Collective::from_labels(alphabet, labels.clone()).unwrap();
            let n = 1 + ((labels.len() - 1) as f64 * n_frac) as usize;
            let a = LabelSet::from_bits(a).intersect(all);
            let b = LabelSet::from_bits(b).intersect(all);
            let nu = |s: LabelSet| relative_frequency(&c, s, n).unwrap();
            prop_assert_eq!(nu(all), int(1));
            // additivity on disjoint parts
            let b_only = b.difference(a);
            prop_assert_eq!(nu(a.union(b_only)), nu(a) + nu(b_only));
            // difference
            prop_assert_eq!(nu(a.difference(b)), nu(a) - nu(a.intersect(b)));
            // Bayes at finite N
            let na = c.count(a, n).unwrap();
            if na > 0 {
                let nab = c.count(a.intersect(b), n).unwrap();
                prop_assert_eq!(nu(a.intersect(b)) / nu(a), frac(nab as i64, na as i64));
            }
        }
    }
}
