use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;

use super::{AmbientGroup, Element, Subgroup, SubgroupDescriptor as D};
use crate::error::{Error, Result};
use crate::exactnum::{pow_u64, CircleRational, DualElement, GroupElement, PAdicValue, PruferValue};

/// All circle points `a/d` in lowest terms with `d <= bound`.
pub fn circle_window(bound: u64) -> Vec<CircleRational> {
    let mut out = Vec::new();
    for d in 1..=bound.max(1) {
        for a in 0..d {
            if a.gcd(&d) == 1 || (a == 0 && d == 1) {
                out.push(CircleRational::from_i64(a as i64, d as i64));
            }
        }
    }
    out
}

fn circle_points_with_denominators(dens: impl IntoIterator<Item = u64>) -> Vec<CircleRational> {
    let mut out = Vec::new();
    for d in dens {
        for a in 0..d {
            if a.gcd(&d) == 1 || (a == 0 && d == 1) {
                out.push(CircleRational::from_i64(a as i64, d as i64));
            }
        }
    }
    out
}

fn p_powers_up_to(p: u64, bound: u64, max_exp: Option<u64>) -> Vec<(u64, u64)> {
    let mut out = vec![(0, 1)];
    let mut pk = 1u64;
    let mut k = 0u64;
    while let Some(next) = pk.checked_mul(p) {
        if next > bound || max_exp.is_some_and(|c| k + 1 > c) {
            break;
        }
        pk = next;
        k += 1;
        out.push((k, pk));
    }
    out
}

fn circle_points(desc: &D, bound: u64) -> Vec<CircleRational> {
    match desc {
        D::Zero => vec![CircleRational::zero()],
        D::Whole => circle_window(bound),
        D::CyclicInCircle(q) => circle_points_with_denominators((1..=bound.min(*q)).filter(|d| q % d == 0)),
        D::PruferInCircle(p) => {
            circle_points_with_denominators(p_powers_up_to(*p, bound, None).into_iter().map(|x| x.1))
        }
        _ => unreachable!(),
    }
}

fn int_points(desc: &D, bound: u64) -> Vec<BigInt> {
    let b = bound as i64;
    let step = match desc {
        D::Zero => return vec![BigInt::from(0)],
        D::Whole => 1,
        D::MultiplesOfQ(q) => *q as i64,
        D::PAdicBall { p, v } => match p.checked_pow(*v as u32) {
            Some(pv) if pv <= bound => pv as i64,
            _ => return vec![BigInt::from(0)],
        },
        _ => unreachable!(),
    };
    if step > b {
        return vec![BigInt::from(0)];
    }
    (-(b / step)..=(b / step)).map(|i| BigInt::from(i * step)).collect()
}

/// The finite window of a subgroup: circle-type points with denominator at
/// most `bound`, integer-type points with absolute value at most `bound`,
/// and exact-integer points of ℤ_p with absolute value at most `bound`.
/// The result is sorted and duplicate-free.
pub fn descriptor_points(sub: &Subgroup, bound: u64) -> Result<Vec<Element>> {
    if bound == 0 {
        return Err(Error::InvalidParameter("window bound must be positive".into()));
    }
    let desc = sub.descriptor();
    let points: BTreeSet<Element> = match sub.ambient() {
        AmbientGroup::Z => int_points(desc, bound)
            .into_iter()
            .map(|n| Element::Group(GroupElement::Int(n)))
            .collect(),
        AmbientGroup::Circle => circle_points(desc, bound)
            .into_iter()
            .map(|x| Element::Dual(DualElement::Circle(x)))
            .collect(),
        AmbientGroup::PAdic(p) => int_points(desc, bound)
            .into_iter()
            .map(|n| Element::Dual(DualElement::PAdic(PAdicValue::exact(p, n))))
            .collect(),
        AmbientGroup::Prufer(p) => {
            let cap = match desc {
                D::Zero => Some(0),
                D::Whole => None,
                D::FiniteCyclicPrufer { c, .. } => Some(*c),
                _ => unreachable!(),
            };
            let mut out = BTreeSet::new();
            for (k, pk) in p_powers_up_to(p, bound, cap) {
                for a in 0..pk {
                    if k == 0 || a % p != 0 {
                        let modulus = pow_u64(p, k);
                        out.insert(Element::Group(GroupElement::Prufer(PruferValue::with_modulus(
                            p,
                            BigInt::from(a),
                            k,
                            &modulus,
                        ))));
                    }
                }
            }
            out
        }
        AmbientGroup::SplitGroup(p) | AmbientGroup::SplitDual(p) => {
            let (left, right) = sub.split_factors().expect("split ambient");
            let torsions: Vec<u64> = match left {
                D::Zero => vec![0],
                _ => (0..p).collect(),
            };
            let right_points = descriptor_points(&right, bound)?;
            let mut out = BTreeSet::new();
            for t in &torsions {
                for r in &right_points {
                    out.insert(match r {
                        Element::Group(GroupElement::Int(n)) => Element::Group(GroupElement::Split {
                            p,
                            torsion: *t,
                            free: n.clone(),
                        }),
                        Element::Dual(DualElement::Circle(x)) => Element::Dual(DualElement::Split {
                            p,
                            omega: *t,
                            x: x.clone(),
                        }),
                        _ => unreachable!(),
                    });
                }
            }
            out
        }
    };
    Ok(points.into_iter().collect())
}
