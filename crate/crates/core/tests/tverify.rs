//! Pattern enumeration, exhaustive non-membership search and inequality
//! chains against brute-force oracles.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use proptest::prelude::*;
use tseq_core::exactnum::{ExponentGuard, GroupElement};
use tseq_core::sequences::{Sequence, SequenceSpec};
use tseq_core::tverify::{
    check_inequality_chain, check_inequality_chain_with, check_not_in_a, enumerate_patterns, pattern_value,
    sample_chain_suite, witness_m, CaseId, ChainInput, FaultInjection, SumPattern,
};

/// Every coefficient vector on `[m, h]` with weight in `1..=k+1`.
fn naive_patterns(k: u32, m: u64, h: u64) -> BTreeSet<Vec<(u64, i64)>> {
    let cap = i64::from(k) + 1;
    let idx: Vec<u64> = (m..=h).collect();
    let mut out = BTreeSet::new();
    let mut coeffs = vec![-cap; idx.len()];
    loop {
        let w: i64 = coeffs.iter().map(|c| c.abs()).sum();
        if w >= 1 && w <= cap {
            let pat: Vec<(u64, i64)> = idx
                .iter()
                .zip(&coeffs)
                .filter(|(_, c)| **c != 0)
                .map(|(i, c)| (*i, *c))
                .collect();
            out.insert(pat);
        }
        let mut pos = 0;
        loop {
            if pos == coeffs.len() {
                return out;
            }
            if coeffs[pos] < cap {
                coeffs[pos] += 1;
                break;
            }
            coeffs[pos] = -cap;
            pos += 1;
        }
    }
}

fn as_pairs(p: &SumPattern) -> Vec<(u64, i64)> {
    p.terms().iter().map(|t| (t.index, t.coeff)).collect()
}

#[test]
fn enumeration_equals_naive_listing() {
    for k in 0..=2 {
        for m in [1, 4, 9] {
            for width in 0..=4 {
                let h = m + width;
                let got: Vec<Vec<(u64, i64)>> = enumerate_patterns(k, m, h).map(|p| as_pairs(&p)).collect();
                let set: BTreeSet<_> = got.iter().cloned().collect();
                assert_eq!(set.len(), got.len(), "duplicates for k={k} m={m} h={h}");
                assert_eq!(set, naive_patterns(k, m, h), "k={k} m={m} h={h}");
            }
        }
    }
}

#[test]
fn empty_range_enumerates_nothing() {
    assert_eq!(enumerate_patterns(2, 7, 6).count(), 0);
}

fn brute_values(seq: &Sequence, k: u32, m: u64, h: u64) -> BTreeSet<GroupElement> {
    naive_patterns(k, m, h)
        .into_iter()
        .map(|terms| {
            terms.iter().fold(seq.zero(), |acc, &(i, c)| {
                let t = seq.term(i).unwrap().scale(&BigInt::from(c));
                acc.try_add(&t).unwrap()
            })
        })
        .collect()
}

/// The exhaustive search against the naive value set, on ranges small
/// enough that some targets really are members.
#[test]
fn exhaustive_search_agrees_with_brute_force() {
    let guard = ExponentGuard::default();
    let cases = [
        (
            SequenceSpec::integer_gamma(2, 1).unwrap(),
            (-12i64..=12).map(GroupElement::int).collect::<Vec<_>>(),
        ),
        (
            SequenceSpec::integer_gamma(3, 3).unwrap(),
            (-12i64..=12).map(GroupElement::int).collect(),
        ),
        (
            SequenceSpec::split_sum(2).unwrap(),
            (-8i64..=8)
                .flat_map(|b| [GroupElement::split(2, 0, b), GroupElement::split(2, 1, b)])
                .collect(),
        ),
        (
            SequenceSpec::prufer_sum(2, 1).unwrap(),
            (1i64..16).map(|a| GroupElement::prufer(2, a, 4)).collect(),
        ),
    ];
    for (spec, targets) in cases {
        let seq = Sequence::new(spec, guard).unwrap();
        for k in 0..=1 {
            let (m, h) = (1, 5);
            let values = brute_values(&seq, k, m, h);
            let mut members = 0;
            for g in targets.iter().filter(|g| !g.is_zero()) {
                let r = check_not_in_a(&seq, g, k, m, h).unwrap();
                assert_eq!(r.exhaustive_clear, !values.contains(g), "{spec} g={g} k={k}");
                if let Some(p) = &r.counterexample {
                    members += 1;
                    assert_eq!(&pattern_value(&seq, p).unwrap(), g);
                    assert!(p.weight() <= u64::from(k) + 1);
                    assert!(p.min_index().unwrap() >= m && p.max_index().unwrap() <= h);
                }
            }
            assert!(members > 0, "{spec} k={k}: oracle test has no members");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// `A(k, m+1) ⊆ A(k, m)` and `A(k-1, m) ⊆ A(k, m)`, so clearing a
    /// target survives raising m and lowering k.
    #[test]
    fn clearing_is_anti_monotone(b in -20i64..=20, k in 1u32..=2, m in 1u64..=4) {
        prop_assume!(b != 0);
        let seq = Sequence::new(SequenceSpec::integer_gamma(2, 2).unwrap(), ExponentGuard::default()).unwrap();
        let g = GroupElement::int(b);
        let h = 7;
        let base = check_not_in_a(&seq, &g, k, m, h).unwrap();
        if base.exhaustive_clear {
            prop_assert!(check_not_in_a(&seq, &g, k, m + 1, h).unwrap().exhaustive_clear);
            prop_assert!(check_not_in_a(&seq, &g, k - 1, m, h).unwrap().exhaustive_clear);
        }
        prop_assert!(base.patterns_checked >= check_not_in_a(&seq, &g, k, m + 1, h).unwrap().patterns_checked);
    }
}

#[test]
fn witness_bounds_follow_the_target_size() {
    let s = SequenceSpec::integer_gamma(3, 3).unwrap();
    assert_eq!(witness_m(&s, &GroupElement::int(3), 0).unwrap(), 10 * (3 + 6));
    assert_eq!(witness_m(&s, &GroupElement::int(-3), 1).unwrap(), 10 * (3 + 12));
    let s = SequenceSpec::split_sum(2).unwrap();
    assert_eq!(witness_m(&s, &GroupElement::split(2, 1, 1), 0).unwrap(), 10 * (1 + 2));
    let s = SequenceSpec::prufer_sum(2, 1).unwrap();
    assert_eq!(witness_m(&s, &GroupElement::prufer(2, 1, 3), 0).unwrap(), 10 * (2 + 3));
    assert!(witness_m(&s, &GroupElement::prufer(2, 0, 3), 0).is_err());
}

#[test]
fn targets_are_cleared_at_the_witness_bound() {
    let guard = ExponentGuard::default();
    let cases = [
        (SequenceSpec::integer_gamma(2, 1).unwrap(), GroupElement::int(1), 1),
        (SequenceSpec::split_sum(2).unwrap(), GroupElement::split(2, 1, 1), 0),
        (
            SequenceSpec::prufer_sum(2, 1).unwrap(),
            GroupElement::prufer(2, 1, 3),
            0,
        ),
    ];
    for (spec, g, k) in cases {
        let seq = Sequence::new(spec, guard).unwrap();
        let m = witness_m(&spec, &g, k).unwrap();
        let r = check_not_in_a(&seq, &g, k, m, m + 8).unwrap();
        assert!(r.exhaustive_clear, "{spec} {g}");
        assert!(r.gap_trend.holds(), "{spec} {g}");
        assert!(r.min_gap_by_max_index.iter().all(|row| !row.min_gap.is_zero()));
    }
}

#[test]
fn suites_are_seeded_and_cover_every_case() {
    let spec = SequenceSpec::split_sum(2).unwrap();
    let seq = Sequence::new(spec, ExponentGuard::default()).unwrap();
    let g = GroupElement::split(2, 1, 1);
    let a = sample_chain_suite(&seq, &g, 1, 48, 7).unwrap();
    let b = sample_chain_suite(&seq, &g, 1, 48, 7).unwrap();
    let c = sample_chain_suite(&seq, &g, 1, 48, 8).unwrap();
    let pats = |s: &tseq_core::tverify::ChainSuite| s.reports.iter().map(|r| r.pattern.clone()).collect::<Vec<_>>();
    assert_eq!(pats(&a), pats(&b));
    assert_ne!(pats(&a), pats(&c));
    assert!(a.all_hold());
    for case in CaseId::ALL.into_iter().filter(|c| c.applies(&spec, 1)) {
        assert!(a.count(case) > 0, "{case} missing");
    }
    assert_eq!(a.count(CaseId::GeometricTail), 0);
}

#[test]
fn fault_injection_flips_one_verdict() {
    let spec = SequenceSpec::integer_gamma(2, 1).unwrap();
    let seq = Sequence::new(spec, ExponentGuard::default()).unwrap();
    let g = GroupElement::int(1);
    let m = witness_m(&spec, &g, 0).unwrap();
    let input = ChainInput {
        pattern: SumPattern::new(vec![(m + 1, 1)]).unwrap(),
        k: 0,
        m,
        target: Some(g),
    };
    let clean = check_inequality_chain(&seq, CaseId::OddOnly, &input).unwrap();
    assert!(clean.holds);
    let faulty =
        check_inequality_chain_with(&seq, CaseId::OddOnly, &input, FaultInjection { flip_line: Some(0) }).unwrap();
    assert!(!faulty.holds);
    assert_eq!(faulty.lines.len(), clean.lines.len());
}

#[test]
fn chains_reject_patterns_outside_their_case() {
    let spec = SequenceSpec::integer_gamma(2, 1).unwrap();
    let seq = Sequence::new(spec, ExponentGuard::default()).unwrap();
    let g = GroupElement::int(1);
    let m = witness_m(&spec, &g, 1).unwrap();
    let even_only = ChainInput {
        pattern: SumPattern::new(vec![(m + 1, 1), (m + 3, 1)]).unwrap(),
        k: 1,
        m,
        target: Some(g),
    };
    assert!(check_inequality_chain(&seq, CaseId::EvenOnly, &even_only).is_err());
    assert!(check_inequality_chain(&seq, CaseId::GeometricTail, &even_only).is_err());
}
