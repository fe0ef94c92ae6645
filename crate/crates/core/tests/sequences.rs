//! Sequence terms against a from-scratch evaluation of the definitions.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use proptest::prelude::*;
use tseq_core::exactnum::{ExponentGuard, GroupElement};
use tseq_core::sequences::{seq_term, Sequence, SequenceSpec};

fn pow(b: u64, e: u64) -> BigInt {
    num_traits::pow(BigInt::from(b), e as usize)
}

/// `Σ_{j=0}^{n} b^(n³ - j n)` term by term.
fn f(b: u64, n: u64) -> BigInt {
    (0..=n).map(|j| pow(b, n * n * n - j * n)).sum()
}

fn frac_part(x: BigRational) -> BigRational {
    let r = x.numer().mod_floor(x.denom());
    BigRational::new(r, x.denom().clone())
}

fn oracle(spec: &SequenceSpec, index: u64) -> GroupElement {
    let n = index.div_ceil(2);
    let even = index.is_multiple_of(2);
    match *spec {
        SequenceSpec::SplitSum { p, a_e } => {
            if even {
                GroupElement::split(p, 0, pow(p, n))
            } else {
                GroupElement::split(p, a_e as i64, f(p, n))
            }
        }
        SequenceSpec::IntegerGamma { q, gamma } => {
            if even {
                GroupElement::Int(pow(q, n))
            } else {
                GroupElement::Int(f(q, n) + gamma)
            }
        }
        SequenceSpec::PruferSum { .. } => unreachable!("compared through the circle"),
    }
}

fn prufer_oracle(p: u64, c: u64, index: u64) -> BigRational {
    let n = index.div_ceil(2);
    let inv = |e: u64| BigRational::new(1.into(), pow(p, e));
    if index.is_multiple_of(2) {
        return frac_part(inv(n));
    }
    let tail: BigRational = (0..=n).map(|j| inv(n * n * n - j * n)).sum();
    frac_part(tail + inv(c))
}

fn specs() -> Vec<SequenceSpec> {
    let mut out = Vec::new();
    for p in [2, 3, 5] {
        out.push(SequenceSpec::split_sum(p).unwrap());
        out.push(SequenceSpec::integer_gamma(p, 1).unwrap());
        out.push(SequenceSpec::integer_gamma(p, p).unwrap());
        out.push(SequenceSpec::integer_gamma(p, 2).unwrap());
    }
    out
}

#[test]
fn terms_match_definitions() {
    let guard = ExponentGuard::default();
    for spec in specs() {
        let seq = Sequence::new(spec, guard).unwrap();
        for i in 1..=14 {
            assert_eq!(*seq.term(i).unwrap(), oracle(&spec, i), "{spec} d{i}");
        }
    }
}

#[test]
fn prufer_terms_match_definitions() {
    let guard = ExponentGuard::default();
    for (p, c) in [(2, 1), (2, 3), (3, 1), (5, 2)] {
        let spec = SequenceSpec::prufer_sum(p, c).unwrap();
        for i in 1..=12 {
            let GroupElement::Prufer(v) = seq_term(&spec, i, &guard).unwrap() else {
                panic!("not a Prüfer element")
            };
            assert_eq!(v.to_circle().to_rational(), prufer_oracle(p, c, i), "{spec} d{i}");
        }
    }
}

#[test]
fn torsion_coefficient_is_carried_on_odd_terms() {
    let guard = ExponentGuard::default();
    let spec = SequenceSpec::SplitSum { p: 5, a_e: 3 }.validated().unwrap();
    for i in 1..=8 {
        assert_eq!(seq_term(&spec, i, &guard).unwrap(), oracle(&spec, i));
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(SequenceSpec::split_sum(4).is_err());
    assert!(SequenceSpec::prufer_sum(6, 1).is_err());
    assert!(SequenceSpec::prufer_sum(2, 0).is_err());
    assert!(SequenceSpec::integer_gamma(1, 1).is_err());
    let guard = ExponentGuard::default();
    assert!(seq_term(&SequenceSpec::split_sum(2).unwrap(), 0, &guard).is_err());
}

#[test]
fn guard_refuses_huge_terms() {
    let guard = ExponentGuard::new(10_000);
    let spec = SequenceSpec::integer_gamma(2, 1).unwrap();
    assert!(seq_term(&spec, 2 * 20 - 1, &guard).is_ok());
    assert!(matches!(
        seq_term(&spec, 2 * 30 - 1, &guard),
        Err(tseq_core::Error::ExponentTooLarge { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn memoized_terms_are_stable(i in 1u64..40, j in 1u64..40) {
        let spec = SequenceSpec::integer_gamma(3, 3).unwrap();
        let seq = Sequence::new(spec, ExponentGuard::default()).unwrap();
        let a = seq.term(i).unwrap();
        let _ = seq.term(j).unwrap();
        prop_assert_eq!(&*seq.term(i).unwrap(), &*a);
        prop_assert_eq!(&*a, &seq_term(&spec, i, &ExponentGuard::default()).unwrap());
    }
}
