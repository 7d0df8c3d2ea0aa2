//! Acceptance criteria, one PASS/FAIL line each. Oracles here are computed
//! independently of the library paths they check.

use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use padic_prob::cylinder::{integrate_continuous, integrate_step, Clopen, ContinuousMap, StepFunction, UniformMeasure};
use padic_prob::frequency::{relative_frequency, Alphabet, Collective, LabelSet, SequenceSelector};
use padic_prob::gvalued::{convolve, GDistribution, GroupContext};
use padic_prob::limit::{
    binom_vp, charfun_to_mahler, checkpoint_forcing, gamma1_bounded_check, randomness_test, verify_eq5,
    verify_lln, verify_thm31, BernoulliParams, Decision, RandomnessOptions, Region, TheoremOptions,
};
use padic_prob::padic::{vp, FormalSeries, Valuation};
use padic_prob::rational::{frac, int};
use padic_prob::{Prime, Rational};

type Check = Result<String, String>;

fn config_runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn pr(n: u64) -> Prime {
    Prime::new(n).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// C(n, r) by the multiplicative formula.
fn choose(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let mut c = BigUint::one();
    for i in 0..r {
        c = c * (n - i) / (i + 1);
    }
    c
}

fn ratio(num: BigUint, den: BigUint) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

fn non_decreasing(v: &[Valuation]) -> bool {
    v.windows(2).all(|w| w[0] <= w[1])
}

/// v_p(s - r) >= l, with s = r counting as infinite.
fn in_ball(s: u64, r: u64, p: u64, l: u32) -> bool {
    let d = s.abs_diff(r);
    d == 0 || d % p.pow(l) == 0
}

fn criterion1() -> Check {
    let p = pr(3);
    let sel = SequenceSelector::affine(p, 2, 1).map_err(err)?;
    let mut brute_rows = 0;
    for l in 1..=2u32 {
        for r in 0..=2u64 {
            let rep = verify_thm31(p, 2, r, l, &sel, &TheoremOptions::new(7)).map_err(err)?;
            let vals = rep.trace.valuations();
            ensure(vals.len() == 7, || format!("l={l} r={r}: {} rows", vals.len()))?;
            ensure(non_decreasing(&vals), || format!("l={l} r={r}: valuations {vals:?} decrease"))?;
            ensure(vals[6].at_least(5), || format!("l={l} r={r}: final valuation {}", vals[6]))?;
            let limit = ratio(choose(2, r), BigUint::from(4u32));
            ensure(rep.trace.limit == limit, || format!("l={l} r={r}: limit mismatch"))?;
            for row in rep.trace.rows.iter().filter(|row| row.n <= 20) {
                let hits = (0u32..1 << row.n)
                    .filter(|w| in_ball(w.count_ones() as u64, r, 3, l))
                    .count();
                let brute = frac(hits as i64, 1 << row.n);
                ensure(brute == row.value, || format!("l={l} r={r} N={}: brute force disagrees", row.n))?;
                let dist = vp(&(&brute - &limit), p);
                ensure(dist == row.vp_to_limit, || format!("l={l} r={r} N={}: distance mismatch", row.n))?;
                brute_rows += 1;
            }
            if l == 1 && r == 1 {
                ensure(rep.trace.rows[0].n == 5 && rep.trace.rows[0].value == frac(5, 16), || {
                    "spot value at N=5 is not 5/16".into()
                })?;
            }
        }
    }
    Ok(format!("6 traces to k=7, {brute_rows} rows matched by 2^N enumeration, P(N=5, r=1, l=1)=5/16"))
}

fn criterion2() -> Check {
    for p in [3u64, 5] {
        let sel = SequenceSelector::parse("1+p^k", pr(p)).map_err(err)?;
        let rep = verify_eq5(pr(p), &sel, &TheoremOptions::new(5)).map_err(err)?;
        for (name, r) in [("divisible", &rep.divisible), ("complement", &rep.complement)] {
            let fin = r.trace.final_valuation().unwrap_or(Valuation::Finite(-1));
            ensure(fin.at_least(4), || format!("p={p} {name}: final valuation {fin}"))?;
        }
        ensure(rep.complement_identity, || format!("p={p}: identity flag false"))?;
        for (a, b) in rep.divisible.trace.rows.iter().zip(&rep.complement.trace.rows) {
            // independent: P(p | S_N) = Σ_{p|s} C(N, s) / 2^N
            let n = a.n;
            let hits: BigUint = (0..=n).filter(|s| s % p == 0).map(|s| choose(n, s)).sum();
            let direct = ratio(hits, BigUint::one() << n);
            ensure(direct == a.value, || format!("p={p} N={n}: divisible value mismatch"))?;
            ensure(&a.value + &b.value == int(1), || format!("p={p} N={n}: complement identity fails"))?;
        }
    }
    Ok("p in {3,5}, k<=5: both traces final valuation >= 4, identity exact".into())
}

fn criterion3() -> Check {
    let p = pr(3);
    let params = BernoulliParams::new(p, frac(1, 2)).map_err(err)?;
    let a = int(-1);
    let sel = SequenceSelector::parse("trunc(-1)", p).map_err(err)?;
    let reports = verify_lln(&params, &a, &sel, 5, &TheoremOptions::new(8)).map_err(err)?;
    for (m, rep) in reports.iter().enumerate() {
        // λ_m(-1) = (1/2)^m C(-1, m) = (-1/2)^m
        let limit = num_traits::pow(frac(-1, 2), m);
        ensure(rep.trace.limit == limit, || format!("m={m}: limit mismatch"))?;
        for row in &rep.trace.rows {
            ensure(row.n == 3u64.pow(row.k) - 1, || format!("N_{} = {}", row.k, row.n))?;
            let direct = ratio(choose(row.n, m as u64), BigUint::one() << m);
            ensure(direct == row.value, || format!("m={m} N={}: closed form mismatch", row.n))?;
            let d = vp(&(&row.value - &limit), p);
            ensure(d.at_least(row.k as i64 - 1), || format!("m={m} k={}: valuation {d}", row.k))?;
        }
    }
    // E[C(S_N, m)] by enumerating all 2^N outcomes
    let mut checked = 0;
    for n in [2u64, 8, 26] {
        let mut hist = vec![0u64; n as usize + 1];
        for w in 0u32..1 << n {
            hist[w.count_ones() as usize] += 1;
        }
        for m in 0..=5u64 {
            let total: BigUint = hist.iter().enumerate().map(|(s, &c)| choose(s as u64, m) * c).sum();
            let brute = ratio(total, BigUint::one() << n);
            let expected = ratio(choose(n, m), BigUint::one() << m);
            ensure(brute == expected, || format!("N={n} m={m}: brute-force expectation differs"))?;
            checked += 1;
        }
    }
    Ok(format!("m<=5, k<=8: distance >= k-1; {checked} expectations brute-forced for N in {{2,8,26}}"))
}

fn criterion4() -> Check {
    let allowed = [int(1), int(0), frac(1, 2), frac(-1, 2)];
    for p in [3u64, 5, 7] {
        let rep = gamma1_bounded_check(pr(p), 30).map_err(err)?;
        ensure(rep.coeffs.coeffs.len() == 31, || "expected λ_0..λ_30".into())?;
        ensure(rep.coeffs.coeffs.iter().all(|c| allowed.contains(c)), || format!("p={p}: coefficient outside {{1,0,±1/2}}"))?;
        ensure(rep.bounded && rep.matches_closed_form, || format!("p={p}: not bounded"))?;
        ensure(rep.note.contains("not a proof"), || "missing finite-check label".into())?;
    }
    // independent route: cosh z = Σ λ_m (e^z - 1)^m with λ_m read off above
    let lam = charfun_to_mahler(&FormalSeries::cosh(30), 30).map_err(err)?;
    let w = FormalSeries::exp_minus_one(30);
    let mut back = FormalSeries::zero(30);
    let mut wm = FormalSeries::one(30);
    for c in &lam.coeffs {
        back = back.add(&wm.scale(c)).map_err(err)?;
        wm = wm.mul(&w).map_err(err)?;
    }
    ensure(back == FormalSeries::cosh(30), || "re-expansion does not give cosh z".into())?;
    Ok("finite check, not a proof: λ_0..λ_30 in {1,0,±1/2}, |λ_m|_p <= 1 for p in {3,5,7}".into())
}

fn criterion5() -> Check {
    let p = pr(3);
    let sel = SequenceSelector::parse("1+p^k", p).map_err(err)?;
    let opts = RandomnessOptions::new(1, 0, 2, 6);
    let checkpoints: Vec<u64> = (1..=6).map(|k| 1 + 3u64.pow(k)).collect();
    let bits = checkpoint_forcing(&checkpoints, p, 0, 1, Region::Sphere).map_err(err)?;
    for &n in &checkpoints {
        let s: u64 = bits[..n as usize].iter().map(|&b| b as u64).sum();
        ensure(s % 3 == 0 && s % 9 != 0, || format!("forged sum {s} at N={n} is off the sphere"))?;
    }
    let forged = Collective::from_labels(Alphabet::binary(), bits).map_err(err)?;
    let rep = randomness_test(&forged, &sel, &opts).map_err(err)?;
    ensure(
        matches!(rep.decision, Decision::Rejected { persistent: true, .. }),
        || format!("forged sequence: {:?}", rep.decision),
    )?;
    let zeros = Collective::from_labels(Alphabet::binary(), vec![0; 730]).map_err(err)?;
    let rep0 = randomness_test(&zeros, &sel, &opts).map_err(err)?;
    ensure(rep0.decision == Decision::NotRejected, || format!("zeros: {:?}", rep0.decision))?;
    for row in &rep.rows {
        let mass: BigUint = (0..=row.n).filter(|s| s % 3 == 0 && s % 9 != 0).map(|s| choose(row.n, s)).sum();
        let direct = ratio(mass, BigUint::one() << row.n);
        ensure(direct == row.prob, || format!("k={}: sphere probability mismatch", row.k))?;
        if row.k >= rep.k_eps {
            ensure(vp(&direct, p).at_least(3), || format!("k={}: |P|_3 >= 3^-2", row.k))?;
        }
    }
    Ok(format!("forged: Rejected (PersistentHit); zeros: NotRejected; k_eps={}", rep.k_eps))
}

fn criterion6() -> Check {
    let (q, p) = (pr(2), pr(3));
    let m = UniformMeasure::new(q, p).map_err(err)?;
    let f = ContinuousMap::digit_weight(q, p);
    for depth in 4..=12usize {
        let r = integrate_continuous(&m, &f, depth).map_err(err)?;
        let oracle = frac(3i64.pow(depth as u32) - 1, 4);
        ensure(r.riemann_sum == oracle, || format!("depth {depth}: sum {}", r.riemann_sum))?;
        ensure(r.error_exponent().at_least(depth as i64), || format!("depth {depth}: error exponent"))?;
        ensure(vp(&(&r.riemann_sum + frac(1, 4)), p).at_least(depth as i64), || format!("depth {depth}: not near -1/4"))?;
    }
    let cyl = |s: &str, q: Prime| Clopen::parse(s, q).unwrap();
    let hand = [
        (StepFunction::new(q, vec![(cyl("0", q), int(3)), (cyl("1", q), int(-1))]), int(1)),
        (StepFunction::new(q, vec![(cyl("01;10", q), frac(1, 3))]), frac(1, 6)),
    ];
    for (f, want) in hand {
        let got = integrate_step(&m, &f.map_err(err)?).map_err(err)?;
        ensure(got == want, || format!("step integral {got} != {want}"))?;
    }
    let q3 = pr(3);
    let m3 = UniformMeasure::new(q3, pr(2)).map_err(err)?;
    let ind = StepFunction::new(q3, vec![(cyl("12", q3), int(1))]).map_err(err)?;
    ensure(integrate_step(&m3, &ind).map_err(err)? == frac(1, 9), || "indicator of U_12".into())?;

    let mut runner = config_runner(1000);
    let strat = proptest::collection::vec(proptest::option::of(-50i64..50), 8).prop_flat_map(|vals| {
        (Just(vals), proptest::collection::vec(1i64..30, 8))
    });
    runner
        .run(&strat, |(vals, dens)| {
            let mut pieces = Vec::new();
            for (i, v) in vals.iter().enumerate() {
                if let Some(v) = v {
                    let word = vec![(i >> 2) as u32 & 1, (i >> 1) as u32 & 1, i as u32 & 1];
                    pieces.push((Clopen::cylinder(q, &word).unwrap(), frac(*v, dens[i])));
                }
            }
            let max_v = pieces.iter().map(|(_, c)| vp(c, p)).min().unwrap_or(Valuation::Infinite);
            let f = StepFunction::new(q, pieces).unwrap();
            let integral = integrate_step(&m, &f).unwrap();
            prop_assert!(vp(&integral, p) >= max_v);
            Ok(())
        })
        .map_err(err)?;
    Ok("digit weight -> -1/4 for depths 4..12; hand values exact; 1000 fuzzed bounds hold".into())
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-10_000i64..10_000, 1i64..10_000).prop_map(|(n, d)| frac(n, d))
}

fn criterion7() -> Check {
    let mut report = Vec::new();

    let mut runner = config_runner(1000);
    runner
        .run(&(prop::sample::select(vec![2u64, 3, 5, 7]), small_rational(), small_rational()), |(p, x, y)| {
            let p = pr(p);
            let (vx, vy, vs) = (vp(&x, p), vp(&y, p), vp(&(&x + &y), p));
            prop_assert!(vs >= vx.min(vy));
            if vx != vy {
                prop_assert_eq!(vs, vx.min(vy));
            }
            Ok(())
        })
        .map_err(|e| format!("ultrametric: {e}"))?;
    report.push("ultrametric 1000");

    let alphabet = Alphabet::new("abcd").unwrap();
    let mut runner = config_runner(1000);
    let strat = (proptest::collection::vec(0u8..4, 1..200), 0u64..16, 0u64..16);
    runner
        .run(&strat, |(labels, a, b)| {
            let n = labels.len();
            let c = Collective::from_labels(alphabet.clone(), labels.clone()).unwrap();
            let (a, b) = (LabelSet::from_bits(a), LabelSet::from_bits(b));
            let nu = |s: LabelSet| relative_frequency(&c, s, n).unwrap();
            let direct = |s: LabelSet| frac(labels.iter().filter(|&&l| s.contains(l)).count() as i64, n as i64);
            prop_assert_eq!(nu(a), direct(a));
            let b_only = b.difference(a);
            prop_assert_eq!(nu(a.union(b_only)), nu(a) + nu(b_only));
            prop_assert_eq!(nu(a.difference(b)), nu(a) - nu(a.intersect(b)));
            if !nu(a).is_zero() && !nu(b).is_zero() {
                let b_given_a = nu(a.intersect(b)) / nu(a);
                let a_given_b = nu(a.intersect(b)) / nu(b);
                prop_assert_eq!(b_given_a * nu(a), a_given_b * nu(b));
            }
            Ok(())
        })
        .map_err(|e| format!("frequency identities: {e}"))?;
    report.push("frequency identities 1000");

    let q = pr(3);
    let word = proptest::collection::vec(0u32..3, 0..5);
    let set = proptest::collection::vec(word, 0..6);
    let mut runner = config_runner(1000);
    runner
        .run(&(set.clone(), set.clone(), set), |(x, y, z)| {
            let (a, b, c) = (
                Clopen::from_words(q, &x).unwrap(),
                Clopen::from_words(q, &y).unwrap(),
                Clopen::from_words(q, &z).unwrap(),
            );
            let or = |s: &Clopen, t: &Clopen| s.union(t).unwrap();
            let and = |s: &Clopen, t: &Clopen| s.intersect(t).unwrap();
            prop_assert_eq!(or(&a, &b), or(&b, &a));
            prop_assert_eq!(and(&a, &or(&b, &c)), or(&and(&a, &b), &and(&a, &c)));
            prop_assert_eq!(or(&a, &and(&b, &c)), and(&or(&a, &b), &or(&a, &c)));
            prop_assert_eq!(or(&a, &b).complement(), and(&a.complement(), &b.complement()));
            prop_assert!(or(&a, &a.complement()).is_whole());
            prop_assert!(and(&a, &a.complement()).is_empty());
            // normal form: refining every word into its children and reversing gives the same set
            let mut refined: Vec<Vec<u32>> = x
                .iter()
                .flat_map(|w| (0..3).map(move |d| w.iter().copied().chain([d]).collect()))
                .collect();
            refined.reverse();
            let a2 = Clopen::from_words(q, &refined).unwrap();
            prop_assert_eq!(&a2, &a);
            prop_assert_eq!(Clopen::from_words(q, &a.words()).unwrap(), a.clone());
            prop_assert_eq!(Clopen::parse(&a.to_string(), q).unwrap(), a);
            Ok(())
        })
        .map_err(|e| format!("clopen laws: {e}"))?;
    report.push("clopen laws 1000");

    let dist = (proptest::collection::btree_map(-20i64..20, (0i64..20, 1i64..10), 1..=6)).prop_map(|m| {
        let (xs, ws): (Vec<_>, Vec<_>) = m.into_iter().map(|(x, (n, d))| (int(x), frac(n, d))).unzip();
        GDistribution::scalar(GroupContext::real(), &xs, &ws).unwrap()
    });
    let mut runner = config_runner(200);
    runner
        .run(&(dist.clone(), dist), |(a, b)| {
            let mut brute: std::collections::BTreeMap<i64, Rational> = Default::default();
            for (x, wx) in a.outcomes().iter().zip(a.weights()) {
                for (y, wy) in b.outcomes().iter().zip(b.weights()) {
                    let s = x.parse::<i64>().unwrap() + y.parse::<i64>().unwrap();
                    *brute.entry(s).or_insert_with(Rational::zero) += &wx.0[0] * &wy.0[0];
                }
            }
            let c = convolve(&a, &b).unwrap();
            let got: std::collections::BTreeMap<i64, Rational> = c
                .outcomes()
                .iter()
                .map(|o| o.parse().unwrap())
                .zip(c.weights().iter().map(|w| w.0[0].clone()))
                .collect();
            prop_assert_eq!(got, brute);
            Ok(())
        })
        .map_err(|e| format!("convolution: {e}"))?;
    report.push("convolution 200");

    let mut pairs = 0;
    for p in [2u64, 3, 5, 7] {
        let legendre = |n: u64| -> u64 {
            let (mut s, mut pk) = (0, p);
            while pk <= n {
                s += n / pk;
                pk *= p;
            }
            s
        };
        for n in 0..=200u64 {
            for r in 0..=n {
                let carries = binom_vp(n, r, pr(p)).map_err(err)?;
                let factored = legendre(n) - legendre(r) - legendre(n - r);
                let direct = vp(&Rational::from_integer(BigInt::from(choose(n, r))), pr(p));
                ensure(carries == factored && direct == Valuation::Finite(carries as i64), || {
                    format!("Kummer fails at p={p} n={n} r={r}")
                })?;
                pairs += 1;
            }
        }
    }
    report.push("Kummer");
    Ok(format!("{}; {pairs} binomials", report.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Check, Duration); 7] = [
        ("1 ball probabilities along N_k -> 2", criterion1, Duration::from_secs(10)),
        ("2 divisibility along N_k -> 1", criterion2, Duration::from_secs(5)),
        ("3 Mahler law of large numbers", criterion3, Duration::from_secs(5)),
        ("4 cosh z Mahler coefficients", criterion4, Duration::from_secs(1)),
        ("5 sphere randomness test", criterion5, Duration::from_secs(5)),
        ("6 integration over Z_q", criterion6, Duration::from_secs(60)),
        ("7 property suites", criterion7, Duration::from_secs(60)),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let t = Instant::now();
        let outcome = run();
        let elapsed = t.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > limit => Err(format!("{msg}; too slow ({elapsed:.2?} > {limit:?})")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("PASS criterion {name}: {msg} [{elapsed:.2?}]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg} [{elapsed:.2?}]");
            }
        }
    }
    let total = start.elapsed();
    if total > Duration::from_secs(60) {
        failed += 1;
        println!("FAIL full suite runtime {total:.2?} > 60s");
    }
    println!("{} of 7 criteria passed in {total:.2?}", 7 - failed.min(7));
    if failed > 0 {
        std::process::exit(1);
    }
}
