use std::collections::BTreeSet;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use super::classify::{classify_subsequences, witness_violations, PairingLimit};
use crate::error::{Error, Result};
use crate::exactnum::{is_prime, pairing, pow_u64, CircleRational, DualElement, ExponentGuard};
use crate::groups::{circle_window, descriptor_points, AmbientGroup, Element, Subgroup, SubgroupDescriptor as D};
use crate::sequences::{Sequence, SequenceSpec};

/// How the accepted set was matched to a descriptor.
#[derive(Debug, Clone, Serialize)]
pub struct RecognitionBasis {
    pub candidates: Vec<String>,
    pub matched_at_bound: Vec<String>,
    /// Set when several candidates matched and a larger window was probed.
    pub probe_bound: Option<u64>,
    pub probe_points: usize,
    pub survivors: Vec<String>,
}

/// Direct evaluation of every stated class against the actual terms.
#[derive(Debug, Clone, Default, Serialize)]
pub struct WitnessAudit {
    pub values_checked: u64,
    pub violations: Vec<String>,
}

impl WitnessAudit {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// The characterized subgroup of a sequence, restricted to a finite window of
/// the dual and recognized as a subgroup descriptor.
#[derive(Debug, Clone, Serialize)]
pub struct ScanResult {
    pub spec: SequenceSpec,
    pub dual: AmbientGroup,
    pub bound: u64,
    pub n_max: u64,
    pub window_size: usize,
    pub accepted: Vec<DualElement>,
    /// Window points whose even subsequence alone tends to 0.
    pub even_accepted: Vec<DualElement>,
    pub recognized: Subgroup,
    pub basis: RecognitionBasis,
    pub witnesses: WitnessAudit,
}

impl ScanResult {
    pub fn accepted_text(&self) -> Vec<String> {
        self.accepted.iter().map(|x| x.to_string()).collect()
    }
}

/// Scans circle rationals with denominator at most `bound` (and every
/// torsion coordinate for split duals). Prüfer families are routed to
/// [`scan_s_u_prufer_dual`] with window `bound`.
pub fn scan_s_u(spec: &SequenceSpec, bound: u64, n_max: u64) -> Result<ScanResult> {
    scan_s_u_with(spec, bound, n_max, ExponentGuard::default())
}

pub fn scan_s_u_with(spec: &SequenceSpec, bound: u64, n_max: u64, guard: ExponentGuard) -> Result<ScanResult> {
    if bound < 2 {
        return Err(Error::InvalidParameter("scan bound must be at least 2".into()));
    }
    let dual = spec.ambient().dual().expect("every family has a dual");
    let window: Vec<DualElement> = match dual {
        AmbientGroup::Circle => circle_window(bound).into_iter().map(DualElement::Circle).collect(),
        AmbientGroup::SplitDual(p) => {
            let xs = circle_window(bound);
            (0..p)
                .flat_map(|omega| xs.iter().map(move |x| DualElement::Split { p, omega, x: x.clone() }))
                .collect()
        }
        AmbientGroup::PAdic(_) => return scan_s_u_prufer_dual_with(spec, bound, n_max, guard),
        other => return Err(Error::UnsupportedAmbient(format!("{other}"))),
    };
    run_scan(spec, dual, bound, n_max, guard, window)
}

/// Scans exact integers `z` in `[-window, window]` as characters of ℤ(p^∞).
pub fn scan_s_u_prufer_dual(spec: &SequenceSpec, window: u64, n_max: u64) -> Result<ScanResult> {
    scan_s_u_prufer_dual_with(spec, window, n_max, ExponentGuard::default())
}

pub fn scan_s_u_prufer_dual_with(
    spec: &SequenceSpec,
    window: u64,
    n_max: u64,
    guard: ExponentGuard,
) -> Result<ScanResult> {
    let SequenceSpec::PruferSum { p, c } = *spec else {
        return Err(Error::UnsupportedAmbient(format!("{spec} is not a Prüfer family")));
    };
    let beta = pow_u64(p, c);
    if BigInt::from(window) < beta {
        return Err(Error::InvalidParameter(format!(
            "window {window} is smaller than the order {beta} of u"
        )));
    }
    let w = window as i64;
    let points = (-w..=w).map(|z| DualElement::padic(p, z)).collect();
    run_scan(spec, AmbientGroup::PAdic(p), window, n_max, guard, points)
}

fn run_scan(
    spec: &SequenceSpec,
    dual: AmbientGroup,
    bound: u64,
    n_max: u64,
    guard: ExponentGuard,
    mut window: Vec<DualElement>,
) -> Result<ScanResult> {
    window.sort();
    let seq = Sequence::new(*spec, guard)?;
    // materialize the terms once, in order, so workers only read the memo
    for i in 1..=n_max {
        seq.term(i)?;
    }
    let classified: Vec<(PairingLimit, Vec<String>, u64)> = window
        .par_iter()
        .map(|chi| {
            let limit = classify_subsequences(spec, chi)?;
            if limit.is_inconclusive() {
                return Err(Error::PreconditionViolated(format!(
                    "character {chi} could not be classified"
                )));
            }
            let (violations, checked) = audit(&seq, chi, &limit, n_max)?;
            Ok((limit, violations, checked))
        })
        .collect::<Result<_>>()?;

    let mut accepted = Vec::new();
    let mut even_accepted = Vec::new();
    let mut witnesses = WitnessAudit::default();
    for (chi, (limit, violations, checked)) in window.iter().zip(classified) {
        if limit.is_member() {
            accepted.push(chi.clone());
        }
        if limit.even.is_null() {
            even_accepted.push(chi.clone());
        }
        witnesses.values_checked += checked;
        witnesses.violations.extend(violations);
    }

    let member = |chi: &DualElement| -> Result<bool> { Ok(classify_subsequences(spec, chi)?.is_member()) };
    let (recognized, basis) = recognize(dual, bound, &accepted, member)?;
    Ok(ScanResult {
        spec: *spec,
        dual,
        bound,
        n_max,
        window_size: window.len(),
        accepted,
        even_accepted,
        recognized,
        basis,
        witnesses,
    })
}

/// Evaluates `(d_n, χ)` for `n` in `[1, n_max]` and checks every stated class.
fn audit(seq: &Sequence, chi: &DualElement, limit: &PairingLimit, n_max: u64) -> Result<(Vec<String>, u64)> {
    let mut values: Vec<(u64, CircleRational)> = Vec::with_capacity(n_max as usize);
    for i in 1..=n_max {
        values.push((i, pairing(&*seq.term(i)?, chi)?));
    }
    let (even, odd): (Vec<_>, Vec<_>) = values.iter().cloned().partition(|(i, _)| i % 2 == 0);
    let mut out = Vec::new();
    for (label, class, vals) in [
        ("even", &limit.even, &even),
        ("odd", &limit.odd, &odd),
        ("overall", &limit.overall, &values),
    ] {
        for i in witness_violations(class, vals) {
            out.push(format!("{chi}: {label} class {} fails at index {i}", class.name()));
        }
    }
    Ok((out, values.len() as u64))
}

fn candidate_list(dual: AmbientGroup, bound: u64) -> Result<Vec<Subgroup>> {
    let circle = |b: u64| {
        let mut v = vec![D::Zero, D::Whole];
        v.extend((2..=b).map(D::CyclicInCircle));
        v.extend((2..=b).filter(|&p| is_prime(p)).map(D::PruferInCircle));
        v
    };
    let descs: Vec<D> = match dual {
        AmbientGroup::Circle => circle(bound),
        AmbientGroup::SplitDual(_) => {
            let mut v = Vec::new();
            for left in [D::Zero, D::Whole] {
                for right in circle(bound) {
                    v.push(D::SplitProduct(Box::new(left.clone()), Box::new(right)));
                }
            }
            v
        }
        AmbientGroup::PAdic(_) => {
            let mut v = vec![D::Zero, D::Whole];
            v.extend((2..=bound).map(D::MultiplesOfQ));
            v
        }
        other => return Err(Error::UnsupportedAmbient(format!("{other}"))),
    };
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for d in descs {
        let s = Subgroup::new(dual, d)?;
        if seen.insert(s.clone()) {
            out.push(s);
        }
    }
    Ok(out)
}

fn as_dual(points: Vec<Element>) -> Vec<DualElement> {
    points
        .into_iter()
        .map(|e| match e {
            Element::Dual(d) => d,
            Element::Group(g) => unreachable!("dual window produced {g}"),
        })
        .collect()
}

/// Matches `accepted` against the windowed points of a fixed candidate list.
/// Ties are broken by classifying the points of the tied candidates in the
/// window of size `bound²`.
fn recognize(
    dual: AmbientGroup,
    bound: u64,
    accepted: &[DualElement],
    member: impl Fn(&DualElement) -> Result<bool> + Sync,
) -> Result<(Subgroup, RecognitionBasis)> {
    let candidates = candidate_list(dual, bound)?;
    let mut matched = Vec::new();
    for cand in &candidates {
        if as_dual(descriptor_points(cand, bound)?) == accepted {
            matched.push(cand.clone());
        }
    }
    let accepted_text = || accepted.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let names = |v: &[Subgroup]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let mut basis = RecognitionBasis {
        candidates: names(&candidates),
        matched_at_bound: names(&matched),
        probe_bound: None,
        probe_points: 0,
        survivors: names(&matched),
    };
    if matched.is_empty() {
        return Err(Error::RecognitionFailed {
            accepted: accepted_text(),
        });
    }
    if matched.len() > 1 {
        let probe_bound = bound.saturating_mul(bound);
        let mut probes = BTreeSet::new();
        for cand in &matched {
            let b = if *cand.descriptor() == D::Whole {
                2 * bound
            } else {
                probe_bound
            };
            probes.extend(as_dual(descriptor_points(cand, b)?));
        }
        let probes: Vec<DualElement> = probes.into_iter().collect();
        let verdicts: Vec<bool> = probes.par_iter().map(&member).collect::<Result<_>>()?;
        let mut survivors = Vec::new();
        for cand in &matched {
            let mut agrees = true;
            for (x, m) in probes.iter().zip(&verdicts) {
                if cand.contains(&Element::Dual(x.clone()))? != *m {
                    agrees = false;
                    break;
                }
            }
            if agrees {
                survivors.push(cand.clone());
            }
        }
        basis.probe_bound = Some(probe_bound);
        basis.probe_points = probes.len();
        basis.survivors = names(&survivors);
        if survivors.len() != 1 {
            return Err(Error::RecognitionAmbiguous {
                accepted: accepted_text(),
                candidates: if survivors.is_empty() {
                    names(&matched)
                } else {
                    names(&survivors)
                },
            });
        }
        matched = survivors;
    }
    Ok((matched.remove(0), basis))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle_set(v: &[(i64, i64)]) -> Vec<DualElement> {
        let mut out: Vec<_> = v.iter().map(|&(a, b)| DualElement::circle(a, b)).collect();
        out.sort();
        out
    }

    #[test]
    fn gamma_equal_q_gives_cyclic_subgroup() {
        let spec = SequenceSpec::integer_gamma(3, 3).unwrap();
        let r = scan_s_u(&spec, 10, 20).unwrap();
        assert_eq!(r.accepted, circle_set(&[(0, 1), (1, 3), (2, 3)]));
        assert_eq!(r.recognized.to_string(), "Z(3)");
        assert!(r.witnesses.holds(), "{:?}", r.witnesses.violations);
    }

    #[test]
    fn gamma_one_gives_zero() {
        let spec = SequenceSpec::integer_gamma(3, 1).unwrap();
        let r = scan_s_u(&spec, 10, 20).unwrap();
        assert_eq!(r.accepted, circle_set(&[(0, 1)]));
        assert_eq!(*r.recognized.descriptor(), D::Zero);
    }

    #[test]
    fn split_sum_resolves_tie_with_cyclic_by_probing() {
        let spec = SequenceSpec::split_sum(2).unwrap();
        let r = scan_s_u(&spec, 8, 20).unwrap();
        assert_eq!(r.accepted.len(), 8);
        assert!(r
            .accepted
            .iter()
            .all(|x| matches!(x, DualElement::Split { omega: 0, .. })));
        assert_eq!(
            *r.recognized.descriptor(),
            D::SplitProduct(Box::new(D::Zero), Box::new(D::PruferInCircle(2)))
        );
        assert_eq!(r.basis.matched_at_bound.len(), 2);
        assert_eq!(r.basis.probe_bound, Some(64));
        assert!(r.witnesses.holds(), "{:?}", r.witnesses.violations);
    }

    #[test]
    fn prufer_dual_scan_accepts_multiples_of_beta() {
        let spec = SequenceSpec::prufer_sum(2, 1).unwrap();
        let r = scan_s_u_prufer_dual(&spec, 10, 20).unwrap();
        let evens: Vec<_> = (-5..=5).map(|k| DualElement::padic(2, 2 * k)).collect();
        assert_eq!(r.accepted, evens);
        assert_eq!(*r.recognized.descriptor(), D::MultiplesOfQ(2));
        assert!(r.witnesses.holds(), "{:?}", r.witnesses.violations);

        let spec = SequenceSpec::prufer_sum(3, 2).unwrap();
        let r = scan_s_u_prufer_dual(&spec, 20, 12).unwrap();
        let nines: Vec<_> = (-2..=2).map(|k| DualElement::padic(3, 9 * k)).collect();
        assert_eq!(r.accepted, nines);
    }

    #[test]
    fn prufer_window_must_cover_beta() {
        let spec = SequenceSpec::prufer_sum(3, 2).unwrap();
        assert!(matches!(
            scan_s_u_prufer_dual(&spec, 8, 10),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn recognition_fails_loudly_outside_the_candidate_list() {
        let odd = circle_set(&[(0, 1), (1, 3)]);
        let r = recognize(AmbientGroup::Circle, 6, &odd, |_| Ok(false));
        assert!(matches!(r, Err(Error::RecognitionFailed { .. })));
    }
}
