use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};
use tseq_core::charscan::{classify_subsequences, scan_s_u_prufer_dual_with, scan_s_u_with};
use tseq_core::error::{Error, Result};
use tseq_core::exactnum::{ExponentGuard, GroupElement};
use tseq_core::groups::{parse_dual_element, parse_group_element};
use tseq_core::radical::{almost_map_check, compute_radical_with, lookup, registry};
use tseq_core::sequences::{Sequence, SequenceSpec, TermIndexMeta};
use tseq_core::tverify::{
    check_inequality_chain_with, check_not_in_a, sample_chain_suite_with, witness_m, CaseId, ChainInput, ChainReport,
    FaultInjection, SumPattern,
};

use crate::args::{ChainArgs, Cli, Command, Format, RadicalArgs, RegistryArgs, ScanArgs, TermArgs, VerifyArgs};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_INCONCLUSIVE: u8 = 2;
pub const EXIT_BAD_INPUT: u8 = 3;

/// What a subcommand produced, before formatting.
pub struct Outcome {
    pub result: Value,
    pub text: String,
    pub csv: Option<String>,
    pub code: u8,
}

pub fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::ExponentTooLarge { .. }
        | Error::PrecisionExhausted { .. }
        | Error::RecognitionAmbiguous { .. }
        | Error::RecognitionFailed { .. }
        | Error::UnsupportedAmbient(_)
        | Error::UnsupportedCharacter(_)
        | Error::NoValidGap { .. } => EXIT_INCONCLUSIVE,
        _ => EXIT_BAD_INPUT,
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn code_if(ok: bool) -> u8 {
    if ok {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    if cli.format == Format::Csv && !matches!(cli.command, Command::VerifyTseq(_)) {
        return Err(Error::Parse("csv output is only available for verify-tseq".into()));
    }
    let guard = ExponentGuard::new(cli.guard_bits);
    match &cli.command {
        Command::Term(a) => term(a, guard),
        Command::VerifyTseq(a) => verify(a, guard),
        Command::CheckInequalities(a) => chains(a, guard),
        Command::Scan(a) => scan(a, guard),
        Command::Radical(a) => radical(a, guard),
        Command::Registry(a) => registry_cmd(a, guard),
    }
}

fn target(spec: &SequenceSpec, text: &str) -> Result<GroupElement> {
    parse_group_element(spec.ambient(), text)
}

fn term(a: &TermArgs, guard: ExponentGuard) -> Result<Outcome> {
    let spec = a.family.spec()?;
    let meta = TermIndexMeta::of(a.n)?;
    let seq = Sequence::new(spec, guard)?;
    let value = seq.term(a.n)?;
    let text = value.summary();
    Ok(Outcome {
        result: json!({
            "spec": spec,
            "index": a.n,
            "parity": meta.parity,
            "block": meta.block,
            "value": text,
        }),
        text: format!("{text}\n"),
        csv: None,
        code: EXIT_OK,
    })
}

fn verify(a: &VerifyArgs, guard: ExponentGuard) -> Result<Outcome> {
    let spec = a.family.spec()?;
    let g = target(&spec, &a.g)?;
    let m = match a.m {
        Some(m) => m,
        None => witness_m(&spec, &g, a.k)?,
    };
    let horizon = a.horizon.unwrap_or(m + 16);
    let seq = Sequence::new(spec, guard)?;
    let mut report = check_not_in_a(&seq, &g, a.k, m, horizon)?;
    let mut chains_hold = true;
    if a.samples > 0 {
        let suite = sample_chain_suite_with(&seq, &g, a.k, a.samples, a.seed, FaultInjection::default())?;
        chains_hold = suite.all_hold();
        report.chain_samples = suite.reports;
    }
    let ok = report.exhaustive_clear && report.gap_trend.holds() && chains_hold;

    let mut text = String::new();
    writeln!(text, "spec: {spec}").unwrap();
    writeln!(text, "target: {g}").unwrap();
    writeln!(text, "k: {}  m: {}  horizon: {}", a.k, m, horizon).unwrap();
    writeln!(text, "patterns checked: {}", report.patterns_checked).unwrap();
    writeln!(text, "exhaustive clear: {}", report.exhaustive_clear).unwrap();
    if let Some(c) = &report.counterexample {
        writeln!(text, "counterexample: {c}").unwrap();
    }
    writeln!(text, "min gap nondecreasing: {}", report.gap_trend.holds()).unwrap();
    if a.samples > 0 {
        writeln!(text, "sampled chains hold: {chains_hold}").unwrap();
    }
    let mut csv = String::from("max_index,min_gap,patterns\n");
    for row in &report.min_gap_by_max_index {
        writeln!(csv, "{},{},{}", row.max_index, row.min_gap.text(), row.patterns).unwrap();
    }
    Ok(Outcome {
        result: to_value(&report),
        text,
        csv: Some(csv),
        code: code_if(ok),
    })
}

fn chain_text(r: &ChainReport, text: &mut String) {
    writeln!(
        text,
        "case {} on {}: {}",
        r.case,
        r.pattern,
        if r.holds { "holds" } else { "FAILS" }
    )
    .unwrap();
    for (i, l) in r.lines.iter().enumerate() {
        writeln!(
            text,
            "  [{i}] {} {} {} {}  ({})",
            l.left,
            l.relation,
            l.right,
            if l.holds { "ok" } else { "FALSE" },
            l.statement
        )
        .unwrap();
    }
}

fn chains(a: &ChainArgs, guard: ExponentGuard) -> Result<Outcome> {
    let spec = a.family.spec()?;
    let g = a.g.as_deref().map(|t| target(&spec, t)).transpose()?;
    let fault = FaultInjection {
        flip_line: a.inject_fault,
    };
    let seq = Sequence::new(spec, guard)?;
    if let Some(pattern) = &a.pattern {
        let case: CaseId = a
            .case
            .as_deref()
            .ok_or_else(|| Error::Parse("--case is required with --pattern".into()))?
            .parse()?;
        let pattern: SumPattern = pattern.parse()?;
        let m = match (a.m, &g) {
            (Some(m), _) => m,
            (None, Some(g)) => witness_m(&spec, g, a.k)?,
            (None, None) => return Err(Error::Parse("--m or --g is required".into())),
        };
        let input = ChainInput {
            pattern,
            k: a.k,
            m,
            target: g,
        };
        let report = check_inequality_chain_with(&seq, case, &input, fault)?;
        let mut text = String::new();
        chain_text(&report, &mut text);
        return Ok(Outcome {
            result: to_value(&report),
            text,
            csv: None,
            code: code_if(report.holds),
        });
    }
    if a.case.is_some() {
        return Err(Error::Parse("--case needs --pattern".into()));
    }
    let g = g.ok_or_else(|| Error::Parse("--g is required for a sampled suite".into()))?;
    let suite = sample_chain_suite_with(&seq, &g, a.k, a.samples, a.seed, fault)?;
    let mut per_case: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for r in &suite.reports {
        let e = per_case.entry(r.case.name()).or_default();
        e.0 += 1;
        e.1 += usize::from(r.holds);
    }
    let mut text = String::new();
    writeln!(
        text,
        "spec: {spec}  target: {g}  k: {}  m: {}  seed: {}",
        a.k, suite.m, a.seed
    )
    .unwrap();
    for (case, (n, ok)) in &per_case {
        writeln!(text, "{case}: {ok}/{n} hold").unwrap();
    }
    if !suite.skipped.is_empty() {
        writeln!(text, "skipped: {}", suite.skipped.len()).unwrap();
    }
    for r in suite.reports.iter().filter(|r| !r.holds) {
        chain_text(r, &mut text);
    }
    Ok(Outcome {
        result: to_value(&suite),
        text,
        csv: None,
        code: code_if(suite.all_hold()),
    })
}

fn scan(a: &ScanArgs, guard: ExponentGuard) -> Result<Outcome> {
    let spec = a.family.spec()?;
    if let Some(chi) = &a.chi {
        let dual = spec.ambient().dual().expect("families have duals");
        let chi = parse_dual_element(dual, chi)?;
        let limit = classify_subsequences(&spec, &chi)?;
        let text = format!(
            "{chi}: {} (even {}, odd {}), member: {}\n",
            limit.overall.name(),
            limit.even.name(),
            limit.odd.name(),
            limit.is_member()
        );
        let code = if limit.is_inconclusive() {
            EXIT_INCONCLUSIVE
        } else {
            EXIT_OK
        };
        return Ok(Outcome {
            result: json!({ "character": chi, "member": limit.is_member(), "classification": limit }),
            text,
            csv: None,
            code,
        });
    }
    let r = match spec {
        SequenceSpec::PruferSum { .. } => scan_s_u_prufer_dual_with(&spec, a.window, a.n_max, guard)?,
        _ => scan_s_u_with(&spec, a.bound, a.n_max, guard)?,
    };
    let text = format!(
        "accepted: {{{}}}\nrecognized: {}\nwitness values checked: {}, violations: {}\n",
        r.accepted_text().join(", "),
        r.recognized,
        r.witnesses.values_checked,
        r.witnesses.violations.len()
    );
    Ok(Outcome {
        result: to_value(&r),
        text,
        csv: None,
        code: code_if(r.witnesses.holds()),
    })
}

fn radical(a: &RadicalArgs, guard: ExponentGuard) -> Result<Outcome> {
    let spec = a.family.spec()?;
    let r = compute_radical_with(&spec, a.bound, a.window, a.n_max, guard)?;
    let almost = almost_map_check(&r);
    let known = lookup(&spec);
    let matches = known.as_ref().map(|(_, s)| *s == r.radical);
    let mut text = format!("radical: {}\n", r.radical);
    writeln!(text, "closure of scan: {}", r.closed).unwrap();
    writeln!(text, "finite and non-trivial: {almost}").unwrap();
    if let Some((_, expected)) = &known {
        writeln!(
            text,
            "registry: {expected} ({})",
            if matches == Some(true) { "match" } else { "MISMATCH" }
        )
        .unwrap();
    }
    let ok = matches != Some(false) && r.scan.witnesses.holds();
    Ok(Outcome {
        result: json!({
            "radical": r.radical,
            "finite_nontrivial": almost,
            "registry": known.map(|(e, s)| json!({ "entry": e, "expected": s, "matches": matches })),
            "computation": r,
        }),
        text,
        csv: None,
        code: code_if(ok),
    })
}

/// Registry instances: p, q in {2, 3, 5}, gamma in {1, q}, c in {1, 2}.
pub fn registry_instances() -> Vec<SequenceSpec> {
    let mut out = Vec::new();
    for b in [2u64, 3, 5] {
        out.push(SequenceSpec::IntegerGamma { q: b, gamma: b });
        out.push(SequenceSpec::IntegerGamma { q: b, gamma: 1 });
        out.push(SequenceSpec::SplitSum { p: b, a_e: 1 });
        for c in [1, 2] {
            out.push(SequenceSpec::PruferSum { p: b, c });
        }
    }
    out
}

fn registry_cmd(a: &RegistryArgs, guard: ExponentGuard) -> Result<Outcome> {
    let entries = registry();
    let mut text = String::new();
    for e in &entries {
        writeln!(text, "{} [{}]: {}  ({})", e.family, e.pattern, e.expected, e.statement).unwrap();
    }
    if !a.check {
        return Ok(Outcome {
            result: json!({ "entries": entries }),
            text,
            csv: None,
            code: EXIT_OK,
        });
    }
    let mut rows = Vec::new();
    let mut all = true;
    for spec in registry_instances() {
        let (_, expected) = lookup(&spec).expect("registry covers its instances");
        // a Prüfer window must reach the order of u
        let window = match spec {
            SequenceSpec::PruferSum { p, c } => a.window.max(p.pow(c as u32)),
            _ => a.window,
        };
        let r = compute_radical_with(&spec, a.bound, window, a.n_max, guard)?;
        let ok = r.radical == expected && r.scan.witnesses.holds();
        all &= ok;
        writeln!(
            text,
            "{spec}: expected {expected}, computed {} {}",
            r.radical,
            if ok { "ok" } else { "MISMATCH" }
        )
        .unwrap();
        rows.push(json!({
            "spec": spec,
            "bound": a.bound,
            "window": window,
            "expected": expected,
            "computed": r.radical,
            "matches": ok,
        }));
    }
    Ok(Outcome {
        result: json!({ "entries": entries, "checks": rows }),
        text,
        csv: None,
        code: code_if(all),
    })
}
