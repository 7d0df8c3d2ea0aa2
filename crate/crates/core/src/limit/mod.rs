//! Exact checks of the p-adic limit theorems for sums of Bernoulli variables,
//! their Mahler coefficients and characteristic series, and the sphere-based
//! randomness test.
//!
//! Every quantity is an exact rational; a distance to a limit is the p-adic
//! valuation of an exact difference. A trace is judged converging when its
//! last `window` valuations are non-decreasing and the final one reaches the
//! threshold. That is evidence on a finite window, not a proof.

mod binomial;
mod distribution;
mod mahler;
mod randomness;
mod theorems;

use std::io::Write;

use serde_json::json;

pub use binomial::{binom, binom_rational, binom_vp, padic_binomial};
pub use distribution::{prob_ball, prob_sphere, BernoulliParams, Region, SumDistribution};
pub use mahler::{
    charfun, charfun_to_mahler, clt_charfun, empirical_mahler, gamma1_bounded_check,
    gamma_a_report, mahler_lambda, mahler_lambda_padic, verify_lln, Exponent, Gamma1Report,
    GammaReport, MahlerSeq,
};
pub use randomness::{
    checkpoint_forcing, critical_region, randomness_test, CriticalRegion, Decision, RandomnessOptions, RandomnessReport, SphereRow,
    UnionReport,
};
pub use theorems::{kappa_limit, verify_eq5, verify_thm31, verify_thm32, Eq5Report};

use crate::error::{Error, Result};
use crate::padic::Valuation;
use crate::prime::Prime;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRow {
    pub k: u32,
    pub n: u64,
    pub value: Rational,
    pub vp_to_limit: Valuation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergenceTrace {
    pub prime: Prime,
    pub limit: Rational,
    pub rows: Vec<TraceRow>,
}

impl ConvergenceTrace {
    pub fn new(prime: Prime, limit: Rational) -> Self {
        ConvergenceTrace {
            prime,
            limit,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, k: u32, n: u64, value: Rational) {
        let vp_to_limit = distribution::vp_distance(&value, &self.limit, self.prime);
        self.rows.push(TraceRow {
            k,
            n,
            value,
            vp_to_limit,
        });
    }

    pub fn valuations(&self) -> Vec<Valuation> {
        self.rows.iter().map(|r| r.vp_to_limit).collect()
    }

    pub fn final_valuation(&self) -> Option<Valuation> {
        self.rows.last().map(|r| r.vp_to_limit)
    }

    pub fn verdict(&self, opts: &TheoremOptions) -> TheoremVerdict {
        let v = self.valuations();
        let tail = &v[v.len().saturating_sub(opts.window.max(1))..];
        let monotone = tail.windows(2).all(|w| w[0] <= w[1]);
        match v.last() {
            Some(last) if monotone && last.at_least(opts.threshold()) => TheoremVerdict::Converging,
            _ => TheoremVerdict::NotConverging,
        }
    }

    /// CSV with columns `k,N_k,value_num,value_den,vp_to_limit`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(e.to_string());
        out.write_record(["k", "N_k", "value_num", "value_den", "vp_to_limit"])
            .map_err(io)?;
        for r in &self.rows {
            out.write_record([
                r.k.to_string(),
                r.n.to_string(),
                r.value.numer().to_string(),
                r.value.denom().to_string(),
                r.vp_to_limit.to_string(),
            ])
            .map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Parses the CSV form back; the limit is not part of the file.
    pub fn read_csv(text: &str, prime: Prime, limit: Rational) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let mut trace = ConvergenceTrace::new(prime, limit);
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            let field = |i: usize| rec.get(i).ok_or_else(|| Error::Parse("short CSV row".into()));
            let bad = |s: &str| Error::Parse(format!("bad integer {s:?}"));
            let k = field(0)?.parse().map_err(|_| bad(field(0).unwrap_or("")))?;
            let n = field(1)?.parse().map_err(|_| bad(field(1).unwrap_or("")))?;
            let value = crate::rational::parse_rational(&format!("{}/{}", field(2)?, field(3)?))?;
            let vp_to_limit: Valuation = field(4)?.parse()?;
            trace.push(k, n, value);
            if trace.rows.last().map(|r| r.vp_to_limit) != Some(vp_to_limit) {
                return Err(Error::Parse(format!("row k={k}: recorded distance does not match the value")));
            }
        }
        Ok(trace)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremVerdict {
    Converging,
    NotConverging,
}

impl TheoremVerdict {
    pub fn name(self) -> &'static str {
        match self {
            TheoremVerdict::Converging => "Converging",
            TheoremVerdict::NotConverging => "NotConverging",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TheoremOptions {
    pub kmax: u32,
    /// Minimum final valuation; defaults to `max(1, kmax - 2)`.
    pub threshold: Option<i64>,
    /// Number of trailing rows that must be non-decreasing.
    pub window: usize,
}

impl TheoremOptions {
    pub fn new(kmax: u32) -> Self {
        TheoremOptions {
            kmax,
            threshold: None,
            window: 3,
        }
    }

    pub fn threshold(&self) -> i64 {
        self.threshold.unwrap_or((self.kmax as i64 - 2).max(1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremReport {
    pub theorem: &'static str,
    pub params: serde_json::Value,
    pub trace: ConvergenceTrace,
    pub verdict: TheoremVerdict,
}

impl TheoremReport {
    pub(crate) fn new(
        theorem: &'static str,
        params: serde_json::Value,
        trace: ConvergenceTrace,
        opts: &TheoremOptions,
    ) -> Self {
        let verdict = trace.verdict(opts);
        TheoremReport {
            theorem,
            params,
            trace,
            verdict,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "theorem": self.theorem,
            "params": self.params,
            "verdict": self.verdict.name(),
            "final_valuation": self.trace.final_valuation(),
        })
    }
}
