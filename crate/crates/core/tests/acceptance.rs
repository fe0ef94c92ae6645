//! Acceptance suite. Prints one PASS or FAIL line per criterion and exits
//! non-zero if any criterion fails. Time limits are part of each criterion.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tseq_core::charscan::{scan_s_u, ScanResult};
use tseq_core::exactnum::{pairing, CircleRational, DualElement, ExponentGuard, GroupElement, PAdicValue};
use tseq_core::groups::{closure, descriptor_points, verify_annihilator_pointwise, AmbientGroup, Element, Subgroup};
use tseq_core::radical::{almost_map_check, compute_radical, compute_radical_with, lookup, DEFAULT_N_MAX};
use tseq_core::sequences::{Sequence, SequenceSpec};
use tseq_core::tverify::{check_not_in_a, enumerate_patterns, sample_chain_suite, witness_m, CaseId, ChainSuite};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

struct Criterion {
    id: u32,
    title: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

const CRITERIA: [Criterion; 9] = [
    Criterion {
        id: 1,
        title: "IntegerGamma(3,3): s_u is Z(3), radical qZ(3)",
        limit: Duration::from_secs(5),
        run: c1_gamma_equals_q,
    },
    Criterion {
        id: 2,
        title: "IntegerGamma(3,1): s_u is 0, radical Z",
        limit: Duration::from_secs(5),
        run: c2_gamma_one,
    },
    Criterion {
        id: 3,
        title: "SplitSum(p), p in {2,3}: s_u is 0+Z(p^inf), radical Z(p)+0",
        limit: Duration::from_secs(30),
        run: c3_split_sum,
    },
    Criterion {
        id: 4,
        title: "PruferSum(2,1): evens accepted, radical Z(2^1)",
        limit: Duration::from_secs(10),
        run: c4_prufer_sum,
    },
    Criterion {
        id: 5,
        title: "exhaustive non-membership at the witness m, H = m + 16",
        limit: Duration::from_secs(300),
        run: c5_non_membership,
    },
    Criterion {
        id: 6,
        title: "inequality chains: at least 500 samples per case id",
        limit: Duration::from_secs(300),
        run: c6_chain_samples,
    },
    Criterion {
        id: 7,
        title: "pattern enumeration equals the naive listing",
        limit: Duration::from_secs(60),
        run: c7_enumeration,
    },
    Criterion {
        id: 8,
        title: "bilinearity, scan closure law, annihilator audit",
        limit: Duration::from_secs(120),
        run: c8_structural_laws,
    },
    Criterion {
        id: 9,
        title: "registry matches and is invariant for B in {16, 32, 64}",
        limit: Duration::from_secs(600),
        run: c9_registry,
    },
];

fn main() -> ExitCode {
    let mut failed = 0;
    for c in &CRITERIA {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > c.limit => Err(format!("correct but over the time limit; {detail}")),
            other => other,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "{tag} criterion {}: {} [{:.2}s, limit {}s] {}",
            c.id,
            c.title,
            elapsed.as_secs_f64(),
            c.limit.as_secs(),
            detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        CRITERIA.len() - failed,
        CRITERIA.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn texts(scan: &ScanResult) -> BTreeSet<String> {
    scan.accepted_text().into_iter().collect()
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn c1_gamma_equals_q() -> Outcome {
    let spec = SequenceSpec::integer_gamma(3, 3).unwrap();
    let r = compute_radical_with(&spec, 50, 0, 60, ExponentGuard::default()).map_err(|e| e.to_string())?;
    ensure!(
        texts(&r.scan) == set(&["0", "1/3", "2/3"]),
        "accepted {:?}",
        r.scan.accepted_text()
    );
    ensure!(
        r.scan.recognized.to_string() == "Z(3)",
        "recognized {}",
        r.scan.recognized
    );
    ensure!(
        r.scan.witnesses.holds(),
        "witness audit {:?}",
        r.scan.witnesses.violations
    );
    ensure!(r.radical.to_string() == "qZ(3)", "radical {}", r.radical);
    Ok(format!(
        "accepted {{0, 1/3, 2/3}} of {} points, radical qZ(3)",
        r.scan.window_size
    ))
}

fn c2_gamma_one() -> Outcome {
    let spec = SequenceSpec::integer_gamma(3, 1).unwrap();
    let r = compute_radical_with(&spec, 50, 0, 60, ExponentGuard::default()).map_err(|e| e.to_string())?;
    ensure!(texts(&r.scan) == set(&["0"]), "accepted {:?}", r.scan.accepted_text());
    ensure!(
        r.scan.witnesses.holds(),
        "witness audit {:?}",
        r.scan.witnesses.violations
    );
    ensure!(r.radical == Subgroup::whole(AmbientGroup::Z), "radical {}", r.radical);
    Ok(format!("accepted {{0}} of {} points, radical Z", r.scan.window_size))
}

fn c3_split_sum() -> Outcome {
    for p in [3, 2] {
        let spec = SequenceSpec::split_sum(p).unwrap();
        let r = compute_radical(&spec, 27, 0).map_err(|e| e.to_string())?;
        let want = format!("0+Z({p}^inf)");
        ensure!(
            r.scan.recognized.to_string() == want,
            "p={p}: recognized {}",
            r.scan.recognized
        );
        ensure!(
            r.scan.witnesses.holds(),
            "p={p}: witness audit {:?}",
            r.scan.witnesses.violations
        );
        // the accepted set is exactly the p-power points with omega = 0
        for chi in &r.scan.accepted {
            let DualElement::Split { omega, x, .. } = chi else {
                return Err(format!("p={p}: {chi} is not a split character"));
            };
            let mut d = x.denom().clone();
            while d.is_multiple_of(&BigInt::from(p)) {
                d /= p;
            }
            ensure!(*omega == 0 && d == BigInt::from(1), "p={p}: unexpected {chi}");
        }
        ensure!(
            r.radical.to_string() == format!("Z({p})+0"),
            "p={p}: radical {}",
            r.radical
        );
        ensure!(almost_map_check(&r), "p={p}: almost_map_check failed");
    }
    Ok("p = 3 and p = 2 at B = 27: 0+Z(p^inf), radical Z(p)+0, finite and non-trivial".into())
}

fn c4_prufer_sum() -> Outcome {
    let spec = SequenceSpec::prufer_sum(2, 1).unwrap();
    let r = compute_radical(&spec, 0, 16).map_err(|e| e.to_string())?;
    let got: BTreeSet<DualElement> = r.scan.accepted.iter().cloned().collect();
    let want: BTreeSet<DualElement> = (-16i64..=16).step_by(2).map(|z| DualElement::padic(2, z)).collect();
    ensure!(got == want, "accepted {:?}", r.scan.accepted_text());
    ensure!(
        r.scan.witnesses.holds(),
        "witness audit {:?}",
        r.scan.witnesses.violations
    );
    ensure!(r.radical.to_string() == "Z(2^1)", "radical {}", r.radical);
    ensure!(almost_map_check(&r), "almost_map_check failed");
    Ok(format!(
        "{} even integers accepted in [-16, 16], radical Z(2^1)",
        got.len()
    ))
}

fn targets(spec: &SequenceSpec) -> Vec<GroupElement> {
    match *spec {
        SequenceSpec::IntegerGamma { .. } => [-3, -2, -1, 1, 2, 3].map(GroupElement::int).to_vec(),
        SequenceSpec::SplitSum { p, .. } => (0..p as i64)
            .flat_map(|t| (-3i64..=3).map(move |b| GroupElement::split(p, t, b)))
            .filter(|g| !g.is_zero())
            .collect(),
        SequenceSpec::PruferSum { p, .. } => (1..=3u64)
            .flat_map(|z| {
                let den = p.pow(z as u32) as i64;
                (1..den)
                    .filter(move |a| a % p as i64 != 0)
                    .map(move |a| GroupElement::prufer(p, a, z))
            })
            .collect(),
    }
}

fn c5_non_membership() -> Outcome {
    let guard = ExponentGuard::default();
    let mut specs = Vec::new();
    for b in [2, 3] {
        specs.push(SequenceSpec::integer_gamma(b, 1).unwrap());
        specs.push(SequenceSpec::integer_gamma(b, b).unwrap());
        specs.push(SequenceSpec::split_sum(b).unwrap());
        specs.push(SequenceSpec::prufer_sum(b, 1).unwrap());
        specs.push(SequenceSpec::prufer_sum(b, 2).unwrap());
    }
    let (mut runs, mut patterns) = (0u64, 0u64);
    for spec in specs {
        let seq = Sequence::new(spec, guard).unwrap();
        for g in targets(&spec) {
            for k in 0..=1 {
                let m = witness_m(&spec, &g, k).map_err(|e| e.to_string())?;
                let r = check_not_in_a(&seq, &g, k, m, m + 16).map_err(|e| format!("{spec} {g} k={k}: {e}"))?;
                ensure!(
                    r.exhaustive_clear,
                    "{spec} g={g} k={k}: hit {}",
                    r.counterexample.map(|p| p.to_string()).unwrap_or_default()
                );
                ensure!(r.gap_trend.holds(), "{spec} g={g} k={k}: gap trend {:?}", r.gap_trend);
                runs += 1;
                patterns += r.patterns_checked;
            }
        }
    }
    Ok(format!(
        "{runs} (spec, target, k) runs clear, {patterns} patterns checked"
    ))
}

fn c6_chain_samples() -> Outcome {
    let guard = ExponentGuard::default();
    // (spec, target, k, samples); the k = 4 instance reaches the branch
    // where the high part of a mixed sum vanishes
    let plans = [
        (
            SequenceSpec::split_sum(2).unwrap(),
            GroupElement::split(2, 1, 1),
            1,
            3000,
        ),
        (
            SequenceSpec::integer_gamma(2, 1).unwrap(),
            GroupElement::int(1),
            1,
            3000,
        ),
        (SequenceSpec::integer_gamma(2, 1).unwrap(), GroupElement::int(1), 4, 600),
        (
            SequenceSpec::prufer_sum(2, 1).unwrap(),
            GroupElement::prufer(2, 1, 3),
            1,
            2000,
        ),
        (
            SequenceSpec::prufer_sum(3, 1).unwrap(),
            GroupElement::prufer(3, 1, 2),
            1,
            200,
        ),
        (SequenceSpec::integer_gamma(3, 3).unwrap(), GroupElement::int(3), 1, 60),
    ];
    let mut counts: BTreeMap<CaseId, usize> = BTreeMap::new();
    let mut high_part = BTreeSet::new();
    let mut total = 0;
    for (seed, (spec, g, k, n)) in plans.into_iter().enumerate() {
        let seq = Sequence::new(spec, guard).unwrap();
        let suite: ChainSuite = sample_chain_suite(&seq, &g, k, n, seed as u64).map_err(|e| format!("{spec}: {e}"))?;
        ensure!(
            suite.skipped.is_empty(),
            "{spec}: {} samples skipped",
            suite.skipped.len()
        );
        if let Some(bad) = suite.reports.iter().find(|r| !r.holds) {
            let line = bad.lines.iter().find(|l| !l.holds).map(|l| l.statement.clone());
            return Err(format!("{spec} {} {}: {:?}", bad.case, bad.pattern, line));
        }
        for r in &suite.reports {
            *counts.entry(r.case).or_default() += 1;
            if let Some(z) = r.context.high_part_zero {
                high_part.insert(z);
            }
        }
        total += suite.reports.len();
    }
    for case in CaseId::ALL {
        let n = counts.get(&case).copied().unwrap_or(0);
        ensure!(n >= 500, "only {n} samples of {case}");
    }
    ensure!(high_part.len() == 2, "high part branches seen: {high_part:?}");
    let summary: Vec<String> = counts.iter().map(|(c, n)| format!("{c}={n}")).collect();
    Ok(format!("{total} chains hold; {}", summary.join(" ")))
}

/// Every coefficient vector on `[m, h]` of weight `1..=k+1`.
fn naive_patterns(k: u32, m: u64, h: u64) -> BTreeSet<Vec<(u64, i64)>> {
    let cap = i64::from(k) + 1;
    let len = (h - m + 1) as usize;
    let mut out = BTreeSet::new();
    let mut coeffs = vec![-cap; len];
    'outer: loop {
        let w: i64 = coeffs.iter().map(|c| c.abs()).sum();
        if (1..=cap).contains(&w) {
            out.insert(
                coeffs
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| **c != 0)
                    .map(|(i, c)| (m + i as u64, *c))
                    .collect(),
            );
        }
        for c in coeffs.iter_mut() {
            if *c < cap {
                *c += 1;
                continue 'outer;
            }
            *c = -cap;
        }
        return out;
    }
}

fn c7_enumeration() -> Outcome {
    let mut cases = 0;
    for k in 0..=2 {
        for m in [1, 5, 40] {
            for width in 0..=6 {
                let h = m + width;
                let listed: Vec<Vec<(u64, i64)>> = enumerate_patterns(k, m, h)
                    .map(|p| p.terms().iter().map(|t| (t.index, t.coeff)).collect())
                    .collect();
                let unique: BTreeSet<_> = listed.iter().cloned().collect();
                ensure!(unique.len() == listed.len(), "duplicates at k={k} m={m} h={h}");
                ensure!(unique == naive_patterns(k, m, h), "mismatch at k={k} m={m} h={h}");
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} (k, m, H) ranges match"))
}

fn frac(x: BigRational) -> BigRational {
    BigRational::new(x.numer().mod_floor(x.denom()), x.denom().clone())
}

/// `<g, chi>` in `[0, 1)` from the definitions alone.
fn pairing_oracle(g: &GroupElement, chi: &DualElement) -> BigRational {
    let q = |n: &BigInt, d: &BigInt| BigRational::new(n.clone(), d.clone());
    match (g, chi) {
        (GroupElement::Int(n), DualElement::Circle(x)) => frac(q(&(n * x.numer()), x.denom())),
        (GroupElement::Split { p, torsion, free }, DualElement::Split { omega, x, .. }) => {
            frac(q(&BigInt::from(torsion * omega), &BigInt::from(*p)) + q(&(free * x.numer()), x.denom()))
        }
        (GroupElement::Prufer(v), DualElement::PAdic(PAdicValue::Exact { value, .. })) => frac(q(
            &(v.numer() * value),
            &num_traits::pow(BigInt::from(v.p()), v.exponent() as usize),
        )),
        _ => panic!("no oracle for {g} against {chi}"),
    }
}

fn random_pair(rng: &mut ChaCha8Rng, ambient: AmbientGroup) -> (GroupElement, DualElement) {
    let circle =
        |rng: &mut ChaCha8Rng| CircleRational::from_i64(rng.gen_range(-10_000..10_000), rng.gen_range(1..5000));
    match ambient {
        AmbientGroup::Z => (
            GroupElement::int(rng.gen_range(-1_000_000i64..1_000_000)),
            DualElement::Circle(circle(rng)),
        ),
        AmbientGroup::SplitGroup(p) => (
            GroupElement::split(p, rng.gen_range(0..p as i64), rng.gen_range(-1_000_000i64..1_000_000)),
            DualElement::Split {
                p,
                omega: rng.gen_range(0..p),
                x: circle(rng),
            },
        ),
        AmbientGroup::Prufer(p) => (
            GroupElement::prufer(p, rng.gen_range(-100_000i64..100_000), rng.gen_range(0..20)),
            DualElement::padic(p, rng.gen_range(-1_000_000_000i64..1_000_000_000)),
        ),
        other => panic!("{other} is not a discrete ambient"),
    }
}

fn check_bilinearity(ambient: AmbientGroup, triples: usize, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let err = |e: tseq_core::Error| e.to_string();
    for _ in 0..triples {
        let (g, chi) = random_pair(&mut rng, ambient);
        let (h, psi) = random_pair(&mut rng, ambient);
        let gc = pairing(&g, &chi).map_err(err)?;
        ensure!(gc.to_rational() == pairing_oracle(&g, &chi), "<{g}, {chi}> = {gc}");
        let left = pairing(&g.try_add(&h).map_err(err)?, &chi).map_err(err)?;
        ensure!(
            left == gc.add(&pairing(&h, &chi).map_err(err)?),
            "additivity in g fails at {g}, {h}, {chi}"
        );
        let right = pairing(&g, &chi.try_add(&psi).map_err(err)?).map_err(err)?;
        ensure!(
            right == gc.add(&pairing(&g, &psi).map_err(err)?),
            "additivity in chi fails at {g}, {chi}, {psi}"
        );
    }
    Ok(String::new())
}

fn window_of(ambient: AmbientGroup, bound: u64) -> BTreeSet<DualElement> {
    descriptor_points(&Subgroup::whole(ambient), bound)
        .unwrap()
        .into_iter()
        .filter_map(|e| match e {
            Element::Dual(d) => Some(d),
            Element::Group(_) => None,
        })
        .collect()
}

/// Sums and negatives of accepted points that land in the window must be
/// accepted too.
fn closure_violations(scan: &ScanResult, bound: u64) -> Vec<String> {
    let window = window_of(scan.dual, bound);
    let accepted: BTreeSet<&DualElement> = scan.accepted.iter().collect();
    let mut bad = Vec::new();
    for a in &scan.accepted {
        let n = a.neg();
        if window.contains(&n) && !accepted.contains(&n) {
            bad.push(format!("-({a})"));
        }
        for b in &scan.accepted {
            let s = a.try_add(b).unwrap();
            if window.contains(&s) && !accepted.contains(&s) {
                bad.push(format!("{a} + {b}"));
            }
        }
    }
    bad
}

fn c8_structural_laws() -> Outcome {
    let ambients = [
        AmbientGroup::Z,
        AmbientGroup::SplitGroup(2),
        AmbientGroup::SplitGroup(3),
        AmbientGroup::SplitGroup(5),
        AmbientGroup::Prufer(2),
        AmbientGroup::Prufer(3),
        AmbientGroup::Prufer(5),
    ];
    for (i, a) in ambients.iter().enumerate() {
        check_bilinearity(*a, 10_000, 1000 + i as u64).map_err(|e| format!("{a}: {e}"))?;
    }

    let scans = [
        (SequenceSpec::integer_gamma(2, 2).unwrap(), 32),
        (SequenceSpec::integer_gamma(3, 3).unwrap(), 32),
        (SequenceSpec::integer_gamma(5, 1).unwrap(), 32),
        (SequenceSpec::split_sum(2).unwrap(), 32),
        (SequenceSpec::split_sum(3).unwrap(), 24),
        (SequenceSpec::prufer_sum(2, 2).unwrap(), 32),
        (SequenceSpec::prufer_sum(3, 1).unwrap(), 32),
    ];
    let mut audits = 0;
    for (spec, b) in scans {
        let scan = scan_s_u(&spec, b, 40).map_err(|e| format!("{spec}: {e}"))?;
        let bad = closure_violations(&scan, b);
        ensure!(
            bad.is_empty(),
            "{spec}: accepted set not closed: {:?}",
            &bad[..bad.len().min(5)]
        );
        let closed = closure(&scan.recognized).map_err(|e| e.to_string())?;
        for bound in [8, 16] {
            let audit = verify_annihilator_pointwise(&closed, bound).map_err(|e| e.to_string())?;
            ensure!(
                audit.holds,
                "{spec}: annihilator audit of {closed} at {bound}: {audit:?}"
            );
            audits += 1;
        }
    }
    Ok(format!(
        "{} bilinearity triples, 7 scans closed, {audits} annihilator audits",
        10_000 * ambients.len()
    ))
}

fn registry_instances() -> Vec<SequenceSpec> {
    let mut out = Vec::new();
    for b in [2, 3, 5] {
        out.push(SequenceSpec::integer_gamma(b, b).unwrap());
        out.push(SequenceSpec::integer_gamma(b, 1).unwrap());
        out.push(SequenceSpec::split_sum(b).unwrap());
        for c in [1, 2] {
            out.push(SequenceSpec::prufer_sum(b, c).unwrap());
        }
    }
    out
}

fn c9_registry() -> Outcome {
    let guard = ExponentGuard::default();
    let mut checks = 0;
    for spec in registry_instances() {
        let (_, expected) = lookup(&spec).ok_or_else(|| format!("{spec} has no registry entry"))?;
        for b in [16, 32, 64] {
            let window = match spec {
                SequenceSpec::PruferSum { p, c } => b.max(p.pow(c as u32)),
                _ => b,
            };
            let r = compute_radical_with(&spec, b, window, DEFAULT_N_MAX, guard)
                .map_err(|e| format!("{spec} at B={b}: {e}"))?;
            ensure!(
                r.radical == expected,
                "{spec} at B={b}: computed {}, expected {expected}",
                r.radical
            );
            ensure!(r.scan.witnesses.holds(), "{spec} at B={b}: witness audit failed");
            checks += 1;
        }
    }
    Ok(format!("{checks} (instance, B) radicals equal their registry entry"))
}
