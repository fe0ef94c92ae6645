use serde::Serialize;

use super::{descriptor_points, AmbientGroup, Element, Subgroup, SubgroupDescriptor as D};
use crate::error::{Error, Result};
use crate::exactnum::{pairing, valuation};

fn unsupported(op: &str, sub: &Subgroup) -> Error {
    Error::UnsupportedAmbient(format!("no {op} rule for {sub}"))
}

/// Topological closure in 𝕋, ℤ(p)⊕𝕋 or ℤ_p.
///
/// ℤ(p^∞) is dense in 𝕋; finite subgroups are closed; the integer points
/// βℤ close up to p^{v_p(β)} ℤ_p.
pub fn closure(sub: &Subgroup) -> Result<Subgroup> {
    let ambient = sub.ambient();
    match (ambient, sub.descriptor()) {
        (AmbientGroup::Circle | AmbientGroup::SplitDual(_) | AmbientGroup::PAdic(_), D::Zero | D::Whole) => {
            Ok(sub.clone())
        }
        (AmbientGroup::Circle, D::CyclicInCircle(_)) => Ok(sub.clone()),
        (AmbientGroup::Circle, D::PruferInCircle(_)) => Ok(Subgroup::whole(ambient)),
        (AmbientGroup::SplitDual(_), D::SplitProduct(left, _)) => {
            let (_, right) = sub.split_factors().unwrap();
            let right = closure(&right)?;
            Subgroup::new(
                ambient,
                D::SplitProduct(left.clone(), Box::new(right.descriptor().clone())),
            )
        }
        (AmbientGroup::PAdic(_), D::PAdicBall { .. }) => Ok(sub.clone()),
        (AmbientGroup::PAdic(p), D::MultiplesOfQ(beta)) => Subgroup::new(
            ambient,
            D::PAdicBall {
                p,
                v: valuation(&(*beta).into(), p),
            },
        ),
        _ => Err(unsupported("closure", sub)),
    }
}

fn flip_zero_whole(d: &D) -> D {
    match d {
        D::Zero => D::Whole,
        _ => D::Zero,
    }
}

/// The annihilator of a subgroup of a dual-side ambient, as a subgroup of
/// the predual.
///
/// | dual side            | annihilator           |
/// |----------------------|-----------------------|
/// | ℤ(q) ⊂ 𝕋             | qℤ                    |
/// | ℤ(p^∞) ⊂ 𝕋, 𝕋        | 0                     |
/// | A ⊕ B ⊂ ℤ(p)⊕𝕋       | A^⊥ ⊕ B^⊥             |
/// | p^v ℤ_p, βℤ ⊂ ℤ_p    | ℤ(p^v), v = v_p(β)    |
/// | 0                    | whole predual         |
pub fn annihilator(sub: &Subgroup) -> Result<Subgroup> {
    let ambient = sub.ambient();
    let predual = ambient.predual().ok_or_else(|| unsupported("annihilator", sub))?;
    let desc = match (ambient, sub.descriptor()) {
        (_, D::Zero) => D::Whole,
        (_, D::Whole) => D::Zero,
        (AmbientGroup::Circle, D::CyclicInCircle(q)) => D::MultiplesOfQ(*q),
        (AmbientGroup::Circle, D::PruferInCircle(_)) => D::Zero,
        (AmbientGroup::SplitDual(_), D::SplitProduct(left, _)) => {
            let (_, right) = sub.split_factors().unwrap();
            let right = annihilator(&right)?;
            D::SplitProduct(Box::new(flip_zero_whole(left)), Box::new(right.descriptor().clone()))
        }
        (AmbientGroup::PAdic(p), D::PAdicBall { v, .. }) => D::FiniteCyclicPrufer { p, c: *v },
        (AmbientGroup::PAdic(p), D::MultiplesOfQ(beta)) => D::FiniteCyclicPrufer {
            p,
            c: valuation(&(*beta).into(), p),
        },
        _ => return Err(unsupported("annihilator", sub)),
    };
    Subgroup::new(predual, desc)
}

/// Outcome of checking an annihilator rule point by point on finite windows.
#[derive(Debug, Clone, Serialize)]
pub struct AnnihilatorAudit {
    pub subgroup: String,
    pub annihilator: String,
    pub bound: u64,
    pub pairs_checked: usize,
    /// `(annihilator point, subgroup point)` pairs with non-zero pairing.
    pub violations: Vec<(String, String)>,
    /// Predual points outside the annihilator for which no separating
    /// character was found, even in the widest extended window.
    pub unseparated: Vec<String>,
    pub witness_search_exhausted: bool,
    pub holds: bool,
}

/// Extended windows are tried at `bound * 2^i` for `i` up to this.
const EXTENSION_STEPS: u32 = 4;

fn pair_elements(g: &Element, chi: &Element) -> Result<bool> {
    match (g, chi) {
        (Element::Group(g), Element::Dual(chi)) => Ok(pairing(g, chi)?.is_zero()),
        _ => Err(Error::MismatchedAmbient(format!("cannot pair {g} with {chi}"))),
    }
}

pub fn verify_annihilator_pointwise(sub: &Subgroup, bound: u64) -> Result<AnnihilatorAudit> {
    let ann = annihilator(sub)?;
    let dual_points = descriptor_points(sub, bound)?;
    let ann_points = descriptor_points(&ann, bound)?;

    let mut pairs_checked = 0;
    let mut violations = Vec::new();
    for g in &ann_points {
        for chi in &dual_points {
            pairs_checked += 1;
            if !pair_elements(g, chi)? {
                violations.push((g.to_string(), chi.to_string()));
            }
        }
    }

    let predual_window = descriptor_points(&Subgroup::whole(ann.ambient()), bound)?;
    let mut extended: Vec<Vec<Element>> = vec![dual_points];
    let mut unseparated = Vec::new();
    'points: for g in &predual_window {
        if ann.contains(g)? {
            continue;
        }
        for level in 0..=EXTENSION_STEPS as usize {
            if extended.len() <= level {
                extended.push(descriptor_points(sub, bound << level)?);
            }
            for chi in &extended[level] {
                pairs_checked += 1;
                if !pair_elements(g, chi)? {
                    continue 'points;
                }
            }
        }
        unseparated.push(g.to_string());
    }

    let witness_search_exhausted = !unseparated.is_empty();
    Ok(AnnihilatorAudit {
        subgroup: sub.to_string(),
        annihilator: ann.to_string(),
        bound,
        pairs_checked,
        holds: violations.is_empty() && !witness_search_exhausted,
        violations,
        unseparated,
        witness_search_exhausted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sub(a: AmbientGroup, d: D) -> Subgroup {
        Subgroup::new(a, d).unwrap()
    }

    #[test]
    fn closure_examples() {
        let s = sub(AmbientGroup::Circle, D::PruferInCircle(3));
        assert_eq!(closure(&s).unwrap(), Subgroup::whole(AmbientGroup::Circle));
        let s = sub(AmbientGroup::Circle, D::CyclicInCircle(4));
        assert_eq!(closure(&s).unwrap(), s);
        let s = sub(AmbientGroup::PAdic(2), D::MultiplesOfQ(2));
        assert_eq!(
            closure(&s).unwrap(),
            sub(AmbientGroup::PAdic(2), D::PAdicBall { p: 2, v: 1 })
        );
        let s = sub(AmbientGroup::PAdic(3), D::MultiplesOfQ(18));
        assert_eq!(
            closure(&s).unwrap(),
            sub(AmbientGroup::PAdic(3), D::PAdicBall { p: 3, v: 2 })
        );
    }

    #[test]
    fn closure_rejects_discrete_ambients() {
        let s = sub(AmbientGroup::Z, D::MultiplesOfQ(2));
        assert!(matches!(closure(&s), Err(Error::UnsupportedAmbient(_))));
    }

    #[test]
    fn annihilator_examples() {
        let s = sub(AmbientGroup::Circle, D::CyclicInCircle(3));
        assert_eq!(annihilator(&s).unwrap(), sub(AmbientGroup::Z, D::MultiplesOfQ(3)));

        let s = sub(
            AmbientGroup::SplitDual(3),
            D::SplitProduct(Box::new(D::Zero), Box::new(D::PruferInCircle(3))),
        );
        let closed = closure(&s).unwrap();
        assert_eq!(closed.to_string(), "0+T");
        let ann = annihilator(&closed).unwrap();
        assert_eq!(ann.to_string(), "Z(3)+0");
        assert!(ann.is_finite_nontrivial());

        let s = sub(AmbientGroup::PAdic(2), D::PAdicBall { p: 2, v: 1 });
        let ann = annihilator(&s).unwrap();
        assert_eq!(ann, sub(AmbientGroup::Prufer(2), D::FiniteCyclicPrufer { p: 2, c: 1 }));
    }

    #[test]
    fn annihilator_rejects_predual_ambients() {
        let s = sub(AmbientGroup::Z, D::MultiplesOfQ(2));
        assert!(matches!(annihilator(&s), Err(Error::UnsupportedAmbient(_))));
    }

    #[test]
    fn pointwise_audits() {
        let s = sub(AmbientGroup::Circle, D::CyclicInCircle(3));
        assert!(verify_annihilator_pointwise(&s, 9).unwrap().holds);
        let s = Subgroup::whole(AmbientGroup::Circle);
        let audit = verify_annihilator_pointwise(&s, 5).unwrap();
        assert!(audit.holds, "{audit:?}");
        let s = sub(AmbientGroup::PAdic(2), D::PAdicBall { p: 2, v: 1 });
        assert!(verify_annihilator_pointwise(&s, 8).unwrap().holds);
    }
}
