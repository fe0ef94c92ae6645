use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::{pow_u64, CircleRational, PAdicValue, PruferValue};
use crate::error::{Error, Result};

/// An element of one of the discrete groups ℤ, ℤ(p^∞) or ℤ(p)⊕ℤ.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Int(BigInt),
    Prufer(PruferValue),
    /// `torsion·e + free` in ℤ(p)⊕ℤ, with `torsion` in `[0, p)`.
    Split {
        p: u64,
        torsion: u64,
        free: BigInt,
    },
}

/// A character of one of the groups above: a point of 𝕋, of ℤ(p)⊕𝕋, or a
/// p-adic integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DualElement {
    Circle(CircleRational),
    /// `omega ∈ ℤ(p)` paired through `a·omega/p`, plus a circle point.
    Split {
        p: u64,
        omega: u64,
        x: CircleRational,
    },
    PAdic(PAdicValue),
}

impl GroupElement {
    pub fn int(n: impl Into<BigInt>) -> Self {
        GroupElement::Int(n.into())
    }

    pub fn split(p: u64, torsion: i64, free: impl Into<BigInt>) -> Self {
        GroupElement::Split {
            p,
            torsion: torsion.rem_euclid(p as i64) as u64,
            free: free.into(),
        }
    }

    pub fn prufer(p: u64, num: impl Into<BigInt>, exp: u64) -> Self {
        GroupElement::Prufer(PruferValue::new(p, num.into(), exp))
    }

    /// Identity element of the same ambient group.
    pub fn zero_like(&self) -> Self {
        match self {
            GroupElement::Int(_) => GroupElement::Int(BigInt::zero()),
            GroupElement::Prufer(v) => GroupElement::Prufer(PruferValue::zero(v.p())),
            GroupElement::Split { p, .. } => GroupElement::Split {
                p: *p,
                torsion: 0,
                free: BigInt::zero(),
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            GroupElement::Int(n) => n.is_zero(),
            GroupElement::Prufer(v) => v.is_zero(),
            GroupElement::Split { torsion, free, .. } => *torsion == 0 && free.is_zero(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (GroupElement::Int(a), GroupElement::Int(b)) => Ok(GroupElement::Int(a + b)),
            (GroupElement::Prufer(a), GroupElement::Prufer(b)) if a.p() == b.p() => Ok(GroupElement::Prufer(a.add(b))),
            (
                GroupElement::Split {
                    p,
                    torsion: ta,
                    free: fa,
                },
                GroupElement::Split {
                    p: q,
                    torsion: tb,
                    free: fb,
                },
            ) if p == q => Ok(GroupElement::Split {
                p: *p,
                torsion: (ta + tb) % p,
                free: fa + fb,
            }),
            _ => Err(Error::MismatchedAmbient(format!("{self:?} + {other:?}"))),
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            GroupElement::Int(n) => GroupElement::Int(-n),
            GroupElement::Prufer(v) => GroupElement::Prufer(v.neg()),
            GroupElement::Split { p, torsion, free } => GroupElement::Split {
                p: *p,
                torsion: (p - torsion) % p,
                free: -free,
            },
        }
    }

    pub fn scale(&self, n: &BigInt) -> Self {
        match self {
            GroupElement::Int(a) => GroupElement::Int(a * n),
            GroupElement::Prufer(v) => GroupElement::Prufer(v.scale(n)),
            GroupElement::Split { p, torsion, free } => {
                let t = (BigInt::from(*torsion) * n).mod_floor(&BigInt::from(*p));
                GroupElement::Split {
                    p: *p,
                    torsion: u64::try_from(t).unwrap(),
                    free: free * n,
                }
            }
        }
    }
}

impl DualElement {
    pub fn circle(num: i64, den: i64) -> Self {
        DualElement::Circle(CircleRational::from_i64(num, den))
    }

    pub fn padic(p: u64, value: impl Into<BigInt>) -> Self {
        DualElement::PAdic(PAdicValue::exact(p, value))
    }

    pub fn zero_like(&self) -> Self {
        match self {
            DualElement::Circle(_) => DualElement::Circle(CircleRational::zero()),
            DualElement::Split { p, .. } => DualElement::Split {
                p: *p,
                omega: 0,
                x: CircleRational::zero(),
            },
            DualElement::PAdic(v) => DualElement::PAdic(PAdicValue::exact(v.p(), 0)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            DualElement::Circle(x) => x.is_zero(),
            DualElement::Split { omega, x, .. } => *omega == 0 && x.is_zero(),
            DualElement::PAdic(v) => v.is_zero(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (DualElement::Circle(a), DualElement::Circle(b)) => Ok(DualElement::Circle(a.add(b))),
            (DualElement::Split { p, omega: wa, x: xa }, DualElement::Split { p: q, omega: wb, x: xb }) if p == q => {
                Ok(DualElement::Split {
                    p: *p,
                    omega: (wa + wb) % p,
                    x: xa.add(xb),
                })
            }
            (DualElement::PAdic(a), DualElement::PAdic(b)) if a.p() == b.p() => Ok(DualElement::PAdic(a.add(b))),
            _ => Err(Error::MismatchedAmbient(format!("{self:?} + {other:?}"))),
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            DualElement::Circle(x) => DualElement::Circle(x.neg()),
            DualElement::Split { p, omega, x } => DualElement::Split {
                p: *p,
                omega: (p - omega) % p,
                x: x.neg(),
            },
            DualElement::PAdic(v) => DualElement::PAdic(v.neg()),
        }
    }
}

/// The character pairing `(g, χ)` as a point of ℚ/ℤ.
///
/// * `n ∈ ℤ` against `x ∈ 𝕋`: `n·x`.
/// * `(α, n) ∈ ℤ(p)⊕ℤ` against `(ω, x)`: `α·ω/p + n·x`.
/// * `a/p^k ∈ ℤ(p^∞)` against `z ∈ ℤ_p`: `a·(z mod p^k)/p^k`.
pub fn pairing(g: &GroupElement, chi: &DualElement) -> Result<CircleRational> {
    match (g, chi) {
        (GroupElement::Int(n), DualElement::Circle(x)) => Ok(x.scale(n)),
        (GroupElement::Split { p, torsion, free }, DualElement::Split { p: q, omega, x }) if p == q => {
            let torsion_part = CircleRational::new(BigInt::from(torsion * omega % p), BigInt::from(*p))?;
            Ok(torsion_part.add(&x.scale(free)))
        }
        (GroupElement::Prufer(v), DualElement::PAdic(z)) if v.p() == z.p() => {
            if v.is_zero() {
                return Ok(CircleRational::zero());
            }
            let k = v.exponent();
            let residue = z.residue_mod(k)?;
            let modulus = pow_u64(v.p(), k);
            let value = PruferValue::with_modulus(v.p(), v.numer() * residue, k, &modulus);
            Ok(value.to_circle())
        }
        _ => Err(Error::MismatchedAmbient(format!("cannot pair {g:?} with {chi:?}"))),
    }
}

impl GroupElement {
    /// Display form with huge parts abbreviated.
    pub fn summary(&self) -> String {
        match self {
            GroupElement::Int(n) => crate::report::big_text(n),
            GroupElement::Prufer(v) => v.summary(),
            GroupElement::Split { torsion, free, .. } if free.bits() > crate::report::FULL_BITS => {
                let prefix = match torsion {
                    0 => String::new(),
                    1 => "e+".to_string(),
                    t => format!("{t}*e+"),
                };
                format!("{prefix}{}", crate::report::big_text(free))
            }
            _ => self.to_string(),
        }
    }
}

impl DualElement {
    /// Display form with huge parts abbreviated.
    pub fn summary(&self) -> String {
        match self {
            DualElement::Circle(x) => x.summary(),
            DualElement::Split { omega, x, .. } => format!("({omega}, {})", x.summary()),
            DualElement::PAdic(PAdicValue::Exact { value, .. }) => crate::report::big_text(value),
            DualElement::PAdic(v) => v.to_string(),
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Int(n) => write!(f, "{n}"),
            GroupElement::Prufer(v) => write!(f, "{v}"),
            GroupElement::Split { torsion, free, .. } => {
                if *torsion == 0 {
                    return write!(f, "{free}");
                }
                if *torsion == 1 {
                    write!(f, "e")?;
                } else {
                    write!(f, "{torsion}*e")?;
                }
                if free.is_positive() {
                    write!(f, "+{free}")
                } else if free.is_negative() {
                    write!(f, "-{}", free.abs())
                } else {
                    Ok(())
                }
            }
        }
    }
}

impl fmt::Display for DualElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DualElement::Circle(x) => write!(f, "{x}"),
            DualElement::Split { omega, x, .. } => write!(f, "({omega}, {x})"),
            DualElement::PAdic(v) => write!(f, "{v}"),
        }
    }
}

impl serde::Serialize for GroupElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.summary())
    }
}

impl serde::Serialize for DualElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.summary())
    }
}
