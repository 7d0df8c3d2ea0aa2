use std::io::Write;

use serde_json::{json, Value};

use padic_prob::cylinder::{integrate_continuous, Clopen, ContinuousMap, StepFunction, UniformMeasure};
use padic_prob::frequency::{
    conditional_s_probability, s_probability, Alphabet, Collective, Generator, Limit, LimitOptions,
    LimitOutcome, SequenceSelector, Topology, Verdict,
};
use padic_prob::limit::{
    charfun, charfun_to_mahler, checkpoint_forcing, clt_charfun, gamma1_bounded_check, randomness_test,
    verify_eq5, verify_lln, verify_thm31, verify_thm32, BernoulliParams, ConvergenceTrace, Decision,
    Exponent, RandomnessOptions, Region, TheoremOptions, TheoremReport,
};
use padic_prob::padic::{abs_p, vp, PadicApprox};
use padic_prob::rational::{self, parse_rational, Rational};
use padic_prob::{Error, Prime, Result};

use crate::args::*;

type Out = Box<dyn Write>;

/// Runs the command and returns the one-line summary for stderr.
pub fn run(cli: &Cli, mut out: Out) -> Result<String> {
    let f = cli.format;
    let summary = match &cli.command {
        Command::Valuation(a) => valuation(a, f, &mut out)?,
        Command::Freq(a) => freq(a, f, &mut out)?,
        Command::Thm31(a) => thm31(a, f, &mut out)?,
        Command::Eq5(a) => eq5(a, f, &mut out)?,
        Command::Thm32(a) => thm32(a, f, &mut out)?,
        Command::Lln(a) => lln(a, f, &mut out)?,
        Command::Clt(a) => clt(a, cli.precision, f, &mut out)?,
        Command::Mahler(a) => mahler(a, cli.precision, f, &mut out)?,
        Command::Integrate(a) => integrate(a, f, &mut out)?,
        Command::Test(a) => test(a, f, &mut out)?,
        Command::Forge(a) => forge(a, &mut out)?,
    };
    out.flush()?;
    Ok(summary)
}

fn prime(p: u64) -> Result<Prime> {
    Prime::new(p)
}

fn csv_writer(out: &mut Out) -> csv::Writer<&mut Out> {
    csv::Writer::from_writer(out)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn write_rows(out: &mut Out, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(&r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json(out: &mut Out, v: &Value) -> Result<()> {
    writeln!(out, "{v}")?;
    Ok(())
}

fn valuation(a: &ValuationArgs, f: Format, out: &mut Out) -> Result<String> {
    let p = prime(a.prime)?;
    let x = parse_rational(&a.x)?;
    let v = vp(&x, p);
    let abs = abs_p(&x, p).to_rational();
    let (x_txt, abs_txt) = (rational::to_text(&x), rational::to_text(&abs));
    match f {
        Format::Csv => write_rows(
            out,
            &["x", "prime", "valuation", "abs"],
            [vec![x_txt.clone(), p.to_string(), v.to_string(), abs_txt.clone()]],
        )?,
        Format::Json => write_json(out, &json!({"x": x_txt, "prime": p.get(), "valuation": v, "abs": abs_txt}))?,
    }
    Ok(format!("v={v} abs={abs_txt}"))
}

fn collective(s: &Source) -> Result<Collective> {
    let alphabet = Alphabet::new(&s.alphabet)?;
    match (&s.input, &s.generator) {
        (Some(path), _) => Collective::from_file(alphabet, path),
        (None, Some(g)) => {
            let gen = match g.split_once(':') {
                None if g == "alternating" => Generator::Alternating,
                Some(("periodic", w)) => Generator::Periodic(
                    w.chars()
                        .map(|c| {
                            alphabet
                                .index_of(c)
                                .ok_or_else(|| Error::Parse(format!("{c:?} is not in the alphabet {alphabet}")))
                        })
                        .collect::<Result<_>>()?,
                ),
                Some(("seeded", n)) => {
                    Generator::Seeded(n.parse().map_err(|_| Error::Parse(format!("bad seed {n:?}")))?)
                }
                _ => return Err(Error::Parse(format!("unknown generator {g:?}"))),
            };
            Collective::generated(alphabet, gen)
        }
        (None, None) => Err(Error::InvalidParameter("give --input or --generator".into())),
    }
}

fn freq(a: &FreqArgs, f: Format, out: &mut Out) -> Result<String> {
    let p = prime(a.prime)?;
    let c = collective(&a.source)?;
    let sel = SequenceSelector::parse(&a.selector, p)?;
    let event = c.alphabet().parse_set(&a.event)?;
    let opts = LimitOptions {
        kmax: a.kmax,
        threshold: a.threshold,
        window: a.window,
        topology: Some(match a.topology {
            TopologyArg::Padic => Topology::Padic(p),
            TopologyArg::Real => Topology::Real,
        }),
    };
    let LimitOutcome { verdict, trace } = match &a.given {
        Some(g) => conditional_s_probability(&c, c.alphabet().parse_set(g)?, event, &sel, &opts)?,
        None => s_probability(&c, event, &sel, &opts)?,
    };
    match f {
        Format::Csv => trace.write_csv(&mut *out)?,
        Format::Json => trace.write_jsonl(&mut *out)?,
    }
    Ok(match &verdict {
        Verdict::ConvergenceDetected(Limit::Padic(x)) => format!("{}: {x}", verdict.name()),
        Verdict::ConvergenceDetected(Limit::Real(x)) | Verdict::RangeViolation(x) => {
            format!("{}: {}", verdict.name(), rational::to_text(x))
        }
        Verdict::NoLimitDetected => verdict.name().to_string(),
    })
}

fn theorem_opts(t: &TraceOpts) -> TheoremOptions {
    let mut o = TheoremOptions::new(t.kmax);
    o.threshold = t.threshold;
    o.window = t.window;
    o
}

fn selector_or_affine(sel: &Option<String>, p: Prime, m: u64, t: u64) -> Result<SequenceSelector> {
    match sel {
        Some(s) => SequenceSelector::parse(s, p),
        None => SequenceSelector::affine(p, m, t),
    }
}

fn trace_json(trace: &ConvergenceTrace) -> Value {
    Value::Array(
        trace
            .rows
            .iter()
            .map(|r| {
                json!({
                    "k": r.k,
                    "N_k": r.n,
                    "value": rational::to_fraction_string(&r.value),
                    "vp_to_limit": r.vp_to_limit,
                })
            })
            .collect(),
    )
}

fn report_json(r: &TheoremReport) -> Value {
    let mut v = r.to_json();
    v["limit"] = rational::to_fraction_string(&r.trace.limit).into();
    v["rows"] = trace_json(&r.trace);
    v
}

fn report_summary(r: &TheoremReport) -> String {
    let fin = r.trace.final_valuation().map_or("none".to_string(), |v| v.to_string());
    format!("{}: {} (final vp_to_limit {fin})", r.theorem, r.verdict.name())
}

fn emit_report(r: &TheoremReport, f: Format, out: &mut Out) -> Result<String> {
    match f {
        Format::Csv => r.trace.write_csv(&mut *out)?,
        Format::Json => write_json(out, &report_json(r))?,
    }
    Ok(report_summary(r))
}

fn thm31(a: &Thm31Args, f: Format, out: &mut Out) -> Result<String> {
    let p = prime(a.prime)?;
    let sel = selector_or_affine(&a.selector, p, a.m, a.t)?;
    let r = verify_thm31(p, a.m, a.r, a.l, &sel, &theorem_opts(&a.trace))?;
    emit_report(&r, f, out)
}

fn thm32(a: &Thm32Args, f: Format, out: &mut Out) -> Result<String> {
    let p = prime(a.prime)?;
    let sel = selector_or_affine(&a.selector, p, p.get(), a.t)?;
    let r = verify_thm32(p, a.r, a.l, &sel, &theorem_opts(&a.trace))?;
    emit_report(&r, f, out)
}

fn eq5(a: &Eq5Args, f: Format, out: &mut Out) -> Result<String> {
    let p = prime(a.prime)?;
    let sel = SequenceSelector::parse(&a.selector, p)?;
    let r = verify_eq5(p, &sel, &theorem_opts(&a.trace))?;
    match f {
        Format::Csv if a.complement => r.complement.trace.write_csv(&mut *out)?,
        Format::Csv => r.divisible.trace.write_csv(&mut *out)?,
        Format::Json => write_json(
            out,
            &json!({
                "divisible": report_json(&r.divisible),
                "complement": report_json(&r.complement),
                "complement_identity": r.complement_identity,
            }),
        )?,
    }
    Ok(format!(
        "{}; {}; complement identity {}",
        report_summary(&r.divisible),
        report_summary(&r.complement),
        if r.complement_identity { "holds" } else { "fails" }
    ))
}

fn lln(a: &LlnArgs, f: Format, out: &mut Out) -> Result<String> {
    let p = prime(a.prime)?;
    let params = BernoulliParams::new(p, parse_rational(&a.q)?)?;
    let target = parse_rational(&a.a)?;
    let sel = match &a.selector {
        Some(s) => SequenceSelector::parse(s, p)?,
        None => SequenceSelector::truncation(p, target.clone())?,
    };
    let reports = verify_lln(&params, &target, &sel, a.mmax, &theorem_opts(&a.trace))?;
    match f {
        Format::Csv => write_rows(
            out,
            &["m", "k", "N_k", "value_num", "value_den", "vp_to_limit"],
            reports.iter().enumerate().flat_map(|(m, r)| {
                r.trace.rows.iter().map(move |row| {
                    vec![
                        m.to_string(),
                        row.k.to_string(),
                        row.n.to_string(),
                        row.value.numer().to_string(),
                        row.value.denom().to_string(),
                        row.vp_to_limit.to_string(),
                    ]
                })
            }),
        )?,
        Format::Json => {
            for r in &reports {
                write_json(out, &report_json(r))?;
            }
        }
    }
    let converging = reports.iter().filter(|r| r.verdict.name() == "Converging").count();
    Ok(format!("lln: {converging}/{} Mahler coefficients Converging", reports.len()))
}

fn exponent(n: Option<u64>, a: &Option<String>, p: Option<u64>, precision: u32) -> Result<Exponent> {
    match (n, a) {
        (Some(n), _) => Ok(Exponent::Natural(n)),
        (None, Some(a)) => {
            let p = prime(p.ok_or_else(|| Error::InvalidParameter("--a needs --prime".into()))?)?;
            Ok(Exponent::Padic(PadicApprox::from_rational(&parse_rational(a)?, p, precision)))
        }
        (None, None) => Err(Error::InvalidParameter("give --n or --a".into())),
    }
}

fn coeff_rows(coeffs: &[Rational], p: Option<Prime>) -> impl Iterator<Item = Vec<String>> + '_ {
    coeffs.iter().enumerate().map(move |(i, c)| {
        let mut row = vec![i.to_string(), c.numer().to_string(), c.denom().to_string()];
        if let Some(p) = p {
            row.push(vp(c, p).to_string());
        }
        row
    })
}

fn coeff_json(coeffs: &[Rational], p: Option<Prime>) -> Value {
    Value::Array(
        coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let mut v = json!({"index": i, "coeff": rational::to_fraction_string(c)});
                if let Some(p) = p {
                    v["vp"] = json!(vp(c, p));
                }
                v
            })
            .collect(),
    )
}

fn clt(a: &CltArgs, precision: u32, f: Format, out: &mut Out) -> Result<String> {
    let e = exponent(a.n, &a.a, a.prime, precision)?;
    let psi = clt_charfun(&e, a.order)?;
    match f {
        Format::Csv => write_rows(out, &["power", "coeff_num", "coeff_den"], coeff_rows(psi.coeffs(), None))?,
        Format::Json => write_json(out, &json!({"series": "clt", "order": a.order, "coeffs": coeff_json(psi.coeffs(), None)}))?,
    }
    Ok(format!("clt: {} coefficients", psi.coeffs().len()))
}

fn mahler(a: &MahlerArgs, precision: u32, f: Format, out: &mut Out) -> Result<String> {
    let p = prime(a.prime)?;
    let header = ["m", "lambda_num", "lambda_den", "vp"];
    if a.gamma1 {
        let r = gamma1_bounded_check(p, a.m)?;
        match f {
            Format::Csv => write_rows(out, &header, coeff_rows(&r.coeffs.coeffs, Some(p)))?,
            Format::Json => write_json(
                out,
                &json!({
                    "check": "gamma1",
                    "prime": p.get(),
                    "m_max": r.m_max,
                    "coeffs": coeff_json(&r.coeffs.coeffs, Some(p)),
                    "max_abs": rational::to_fraction_string(&r.max_abs.to_rational()),
                    "bounded": r.bounded,
                    "matches_closed_form": r.matches_closed_form,
                    "note": r.note,
                }),
            )?,
        }
        return Ok(format!(
            "gamma1: bounded={} closed_form={} ({})",
            r.bounded, r.matches_closed_form, r.note
        ));
    }
    let e = exponent(a.n, &a.a, Some(a.prime), precision)?;
    let order = a.m + a.m % 2;
    let phi = if a.clt {
        clt_charfun(&e, order)?
    } else {
        charfun(&e, &BernoulliParams::new(p, parse_rational(&a.q)?)?, order)?
    };
    let seq = charfun_to_mahler(&phi, a.m)?;
    match f {
        Format::Csv => write_rows(out, &header, coeff_rows(&seq.coeffs, Some(p)))?,
        Format::Json => write_json(
            out,
            &json!({
                "series": if a.clt { "clt" } else { "bernoulli" },
                "prime": p.get(),
                "coeffs": coeff_json(&seq.coeffs, Some(p)),
                "max_abs": rational::to_fraction_string(&seq.max_abs(p).to_rational()),
            }),
        )?,
    }
    Ok(format!("mahler: max |lambda_m|_{p} = {}", seq.max_abs(p)))
}

fn integrate(a: &IntegrateArgs, f: Format, out: &mut Out) -> Result<String> {
    let (q, p) = (prime(a.q)?, prime(a.prime)?);
    let m = UniformMeasure::new(q, p)?;
    let map = match a.function.split_once(':') {
        None if a.function == "digit-weight" => ContinuousMap::digit_weight(q, p),
        Some(("constant", c)) => ContinuousMap::constant(q, p, parse_rational(c)?),
        Some(("indicator", words)) => {
            let set = Clopen::parse(words, q)?;
            ContinuousMap::from_step(StepFunction::new(q, vec![(set, Rational::from_integer(1.into()))])?, p)
        }
        _ => return Err(Error::Parse(format!("unknown function {:?}", a.function))),
    };
    let r = integrate_continuous(&m, &map, a.depth)?;
    match f {
        Format::Csv => write_rows(
            out,
            &["depth", "value_num", "value_den", "error_exponent"],
            [vec![
                r.depth.to_string(),
                r.riemann_sum.numer().to_string(),
                r.riemann_sum.denom().to_string(),
                r.error_exponent().to_string(),
            ]],
        )?,
        Format::Json => write_json(out, &r.to_json())?,
    }
    Ok(format!(
        "integral = {} mod {p}^{}",
        rational::to_text(&r.riemann_sum),
        r.error_exponent()
    ))
}

fn region(m: ModeArg) -> Region {
    match m {
        ModeArg::Sphere => Region::Sphere,
        ModeArg::Residue => Region::Residue,
    }
}

fn test(a: &TestArgs, f: Format, out: &mut Out) -> Result<String> {
    let p = prime(a.prime)?;
    let omega = collective(&a.source)?;
    let sel = SequenceSelector::parse(&a.scheme, p)?;
    let mut opts = RandomnessOptions::new(a.l, a.r, a.eps_exp, a.kmax);
    opts.kmin = a.kmin;
    opts.mode = region(a.mode);
    let rep = randomness_test(&omega, &sel, &opts)?;
    match f {
        Format::Csv => write_rows(
            out,
            &["k", "N_k", "prob_num", "prob_den", "vp", "sum", "hit"],
            rep.rows.iter().map(|r| {
                vec![
                    r.k.to_string(),
                    r.n.to_string(),
                    r.prob.numer().to_string(),
                    r.prob.denom().to_string(),
                    r.vp.to_string(),
                    r.sum.to_string(),
                    r.hit.to_string(),
                ]
            }),
        )?,
        Format::Json => write_json(out, &rep.to_json())?,
    }
    Ok(match rep.decision {
        Decision::Rejected { first_hit, persistent } => format!(
            "Rejected (k_eps {}, first hit at k={first_hit}{})",
            rep.k_eps,
            if persistent { ", PersistentHit" } else { "" }
        ),
        Decision::NotRejected => format!("NotRejected (k_eps {})", rep.k_eps),
    })
}

fn forge(a: &ForgeArgs, out: &mut Out) -> Result<String> {
    let p = prime(a.prime)?;
    let sel = SequenceSelector::parse(&a.scheme, p)?;
    let checkpoints: Vec<u64> = sel.terms(a.kmax)?.iter().map(|t| t.n).collect();
    let bits = checkpoint_forcing(&checkpoints, p, a.r, a.l, region(a.mode))?;
    let text: String = bits.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect();
    writeln!(out, "{text}")?;
    Ok(format!("forged {} bits", bits.len()))
}
