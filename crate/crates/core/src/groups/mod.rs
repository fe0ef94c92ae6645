//! Symbolic subgroups of the supported ambient groups.
//!
//! Subgroups here are infinite, so they are never stored as point sets.
//! A [`Subgroup`] pairs an ambient group with a [`SubgroupDescriptor`];
//! finite windows onto it come from [`descriptor_points`]. Closure and
//! annihilator are closed rule tables: shapes outside the table are errors.

mod rules;
mod text;
mod window;

pub use rules::{annihilator, closure, verify_annihilator_pointwise, AnnihilatorAudit};
pub use text::{parse_dual_element, parse_element, parse_group_element};
pub use window::{circle_window, descriptor_points};

use std::fmt;

use crate::error::{Error, Result};
use crate::exactnum::{is_prime, DualElement, GroupElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AmbientGroup {
    /// ℤ
    Z,
    /// 𝕋 = ℚ/ℤ, rational points only
    Circle,
    /// ℤ(p^∞)
    Prufer(u64),
    /// ℤ(p)⊕ℤ
    SplitGroup(u64),
    /// ℤ(p)⊕𝕋, the dual of ℤ(p)⊕ℤ
    SplitDual(u64),
    /// ℤ_p, the dual of ℤ(p^∞)
    PAdic(u64),
}

impl AmbientGroup {
    pub fn prime(&self) -> Option<u64> {
        match self {
            AmbientGroup::Z | AmbientGroup::Circle => None,
            AmbientGroup::Prufer(p)
            | AmbientGroup::SplitGroup(p)
            | AmbientGroup::SplitDual(p)
            | AmbientGroup::PAdic(p) => Some(*p),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.prime() {
            Some(p) if !is_prime(p) => Err(Error::InvalidParameter(format!("{p} is not prime"))),
            _ => Ok(()),
        }
    }

    pub fn is_dual_side(&self) -> bool {
        matches!(
            self,
            AmbientGroup::Circle | AmbientGroup::SplitDual(_) | AmbientGroup::PAdic(_)
        )
    }

    /// The discrete group this dual-side ambient is the character group of.
    pub fn predual(&self) -> Option<AmbientGroup> {
        match self {
            AmbientGroup::Circle => Some(AmbientGroup::Z),
            AmbientGroup::SplitDual(p) => Some(AmbientGroup::SplitGroup(*p)),
            AmbientGroup::PAdic(p) => Some(AmbientGroup::Prufer(*p)),
            _ => None,
        }
    }

    pub fn dual(&self) -> Option<AmbientGroup> {
        match self {
            AmbientGroup::Z => Some(AmbientGroup::Circle),
            AmbientGroup::SplitGroup(p) => Some(AmbientGroup::SplitDual(*p)),
            AmbientGroup::Prufer(p) => Some(AmbientGroup::PAdic(*p)),
            _ => None,
        }
    }

    pub fn contains_element(&self, x: &Element) -> bool {
        match (self, x) {
            (AmbientGroup::Z, Element::Group(GroupElement::Int(_))) => true,
            (AmbientGroup::Circle, Element::Dual(DualElement::Circle(_))) => true,
            (AmbientGroup::Prufer(p), Element::Group(GroupElement::Prufer(v))) => v.p() == *p,
            (AmbientGroup::SplitGroup(p), Element::Group(GroupElement::Split { p: q, .. })) => p == q,
            (AmbientGroup::SplitDual(p), Element::Dual(DualElement::Split { p: q, .. })) => p == q,
            (AmbientGroup::PAdic(p), Element::Dual(DualElement::PAdic(z))) => z.p() == *p,
            _ => false,
        }
    }
}

/// Shape of a subgroup. Which shapes are legal depends on the ambient.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubgroupDescriptor {
    Zero,
    Whole,
    /// qℤ inside ℤ, or the integer points qℤ inside ℤ_p
    MultiplesOfQ(u64),
    /// ℤ(q) = {a/q} inside 𝕋
    CyclicInCircle(u64),
    /// ℤ(p^∞) inside 𝕋
    PruferInCircle(u64),
    /// left factor lives in ℤ(p) and is `Zero` or `Whole`
    SplitProduct(Box<SubgroupDescriptor>, Box<SubgroupDescriptor>),
    /// p^v ℤ_p
    PAdicBall {
        p: u64,
        v: u64,
    },
    /// ℤ(p^c) inside ℤ(p^∞)
    FiniteCyclicPrufer {
        p: u64,
        c: u64,
    },
}

/// A descriptor together with the ambient group it lives in.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    ambient: AmbientGroup,
    desc: SubgroupDescriptor,
}

/// A point of any supported ambient group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Group(GroupElement),
    Dual(DualElement),
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Group(g) => write!(f, "{g}"),
            Element::Dual(d) => write!(f, "{d}"),
        }
    }
}

impl Subgroup {
    /// Validates the descriptor against the ambient and canonicalizes
    /// split products that are really `Zero` or `Whole`.
    pub fn new(ambient: AmbientGroup, desc: SubgroupDescriptor) -> Result<Self> {
        use SubgroupDescriptor as D;
        ambient.validate()?;
        let bad = || {
            Err(Error::UnsupportedAmbient(format!(
                "descriptor {desc:?} does not live in {ambient:?}"
            )))
        };
        let desc = match (&ambient, &desc) {
            (_, D::Zero) | (_, D::Whole) => desc.clone(),
            (AmbientGroup::Z, D::MultiplesOfQ(q)) | (AmbientGroup::PAdic(_), D::MultiplesOfQ(q)) => {
                if *q == 0 {
                    return Err(Error::InvalidParameter("q must be at least 1".into()));
                }
                desc.clone()
            }
            (AmbientGroup::Circle, D::CyclicInCircle(q)) => {
                if *q == 0 {
                    return Err(Error::InvalidParameter("q must be at least 1".into()));
                }
                desc.clone()
            }
            (AmbientGroup::Circle, D::PruferInCircle(p)) => {
                if !is_prime(*p) {
                    return Err(Error::InvalidParameter(format!("{p} is not prime")));
                }
                desc.clone()
            }
            (AmbientGroup::Prufer(p), D::FiniteCyclicPrufer { p: q, .. })
            | (AmbientGroup::PAdic(p), D::PAdicBall { p: q, .. })
                if p == q =>
            {
                desc.clone()
            }
            (AmbientGroup::SplitGroup(_), D::SplitProduct(l, r))
            | (AmbientGroup::SplitDual(_), D::SplitProduct(l, r)) => {
                if !matches!(**l, D::Zero | D::Whole) {
                    return bad();
                }
                let factor = if matches!(ambient, AmbientGroup::SplitGroup(_)) {
                    AmbientGroup::Z
                } else {
                    AmbientGroup::Circle
                };
                let right = Subgroup::new(factor, (**r).clone())?;
                match (&**l, &right.desc) {
                    (D::Zero, D::Zero) => D::Zero,
                    (D::Whole, D::Whole) => D::Whole,
                    _ => D::SplitProduct(l.clone(), Box::new(right.desc)),
                }
            }
            _ => return bad(),
        };
        Ok(Self { ambient, desc })
    }

    pub fn zero(ambient: AmbientGroup) -> Self {
        Self {
            ambient,
            desc: SubgroupDescriptor::Zero,
        }
    }

    pub fn whole(ambient: AmbientGroup) -> Self {
        Self {
            ambient,
            desc: SubgroupDescriptor::Whole,
        }
    }

    pub fn ambient(&self) -> AmbientGroup {
        self.ambient
    }

    pub fn descriptor(&self) -> &SubgroupDescriptor {
        &self.desc
    }

    /// Left (ℤ(p)) and right factors of a subgroup of a split ambient.
    pub(crate) fn split_factors(&self) -> Option<(SubgroupDescriptor, Subgroup)> {
        use SubgroupDescriptor as D;
        let factor = match self.ambient {
            AmbientGroup::SplitGroup(_) => AmbientGroup::Z,
            AmbientGroup::SplitDual(_) => AmbientGroup::Circle,
            _ => return None,
        };
        let (l, r) = match &self.desc {
            D::Zero => (D::Zero, D::Zero),
            D::Whole => (D::Whole, D::Whole),
            D::SplitProduct(l, r) => ((**l).clone(), (**r).clone()),
            _ => return None,
        };
        Some((
            l,
            Subgroup {
                ambient: factor,
                desc: r,
            },
        ))
    }

    /// Whether this names a finite subgroup with more than one element.
    pub fn is_finite_nontrivial(&self) -> bool {
        use SubgroupDescriptor as D;
        match (&self.ambient, &self.desc) {
            (_, D::Zero) => false,
            (AmbientGroup::Circle, D::CyclicInCircle(q)) => *q >= 2,
            (AmbientGroup::Prufer(_), D::FiniteCyclicPrufer { c, .. }) => *c >= 1,
            (AmbientGroup::SplitGroup(_), D::SplitProduct(l, r)) => **l == D::Whole && **r == D::Zero,
            _ => false,
        }
    }

    /// Membership test for a single point of the ambient.
    pub fn contains(&self, x: &Element) -> Result<bool> {
        use SubgroupDescriptor as D;
        if !self.ambient.contains_element(x) {
            return Err(Error::MismatchedAmbient(format!(
                "{x} is not a point of {:?}",
                self.ambient
            )));
        }
        if let Some((left, right)) = self.split_factors() {
            let (t, rest) = match x {
                Element::Group(GroupElement::Split { torsion, free, .. }) => {
                    (*torsion, Element::Group(GroupElement::Int(free.clone())))
                }
                Element::Dual(DualElement::Split { omega, x, .. }) => {
                    (*omega, Element::Dual(DualElement::Circle(x.clone())))
                }
                _ => unreachable!(),
            };
            let left_ok = left == D::Whole || t == 0;
            return Ok(left_ok && right.contains(&rest)?);
        }
        match &self.desc {
            D::Whole => return Ok(true),
            D::Zero => {
                return Ok(match x {
                    Element::Group(g) => g.is_zero(),
                    Element::Dual(d) => d.is_zero(),
                })
            }
            _ => {}
        }
        let out = match (x, &self.desc) {
            (Element::Group(GroupElement::Int(n)), D::MultiplesOfQ(q)) => {
                (n % num_bigint::BigInt::from(*q)) == 0.into()
            }
            (Element::Dual(DualElement::Circle(c)), D::CyclicInCircle(q)) => {
                (num_bigint::BigInt::from(*q) % c.denom()) == 0.into()
            }
            (Element::Dual(DualElement::Circle(c)), D::PruferInCircle(p)) => {
                crate::exactnum::PruferValue::from_circle(*p, c).is_some()
            }
            (Element::Group(GroupElement::Prufer(v)), D::FiniteCyclicPrufer { c, .. }) => v.exponent() <= *c,
            (Element::Dual(DualElement::PAdic(z)), D::PAdicBall { v, .. }) => z.residue_mod(*v)? == 0.into(),
            (Element::Dual(DualElement::PAdic(z)), D::MultiplesOfQ(q)) => match z.as_integer() {
                Some(n) => (n % num_bigint::BigInt::from(*q)) == 0.into(),
                None => {
                    return Err(Error::UnsupportedCharacter(
                        "integer-multiple test needs an exact p-adic integer".into(),
                    ))
                }
            },
            _ => unreachable!("descriptor validated against ambient"),
        };
        Ok(out)
    }
}
