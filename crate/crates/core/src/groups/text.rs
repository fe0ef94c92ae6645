//! Canonical text forms, e.g. `qZ(3)`, `Z(3)+0`, `Z(2^inf)`, `p^1*Zp(2)`.
//!
//! Descriptor text is read relative to a known ambient; ambient text is
//! `Z`, `T`, `Z(p^inf)`, `Z(p)+Z`, `Z(p)+T` or `Zp(p)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;

use super::{AmbientGroup, Element, Subgroup, SubgroupDescriptor as D};
use crate::error::{Error, Result};
use crate::exactnum::{CircleRational, DualElement, GroupElement, PAdicValue, PruferValue, TruncatedPAdic};

impl fmt::Display for AmbientGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AmbientGroup::Z => write!(f, "Z"),
            AmbientGroup::Circle => write!(f, "T"),
            AmbientGroup::Prufer(p) => write!(f, "Z({p}^inf)"),
            AmbientGroup::SplitGroup(p) => write!(f, "Z({p})+Z"),
            AmbientGroup::SplitDual(p) => write!(f, "Z({p})+T"),
            AmbientGroup::PAdic(p) => write!(f, "Zp({p})"),
        }
    }
}

fn parse_u64(s: &str) -> Result<u64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("expected a non-negative integer, got '{s}'")))
}

/// Strips `prefix(` ... `)` and returns the inside.
fn inside<'a>(s: &'a str, prefix: &str) -> Option<&'a str> {
    s.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')
}

impl FromStr for AmbientGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let out = match s.as_str() {
            "Z" => AmbientGroup::Z,
            "T" => AmbientGroup::Circle,
            _ => {
                if let Some((l, r)) = s.split_once('+') {
                    let p = parse_u64(inside(l, "Z").ok_or_else(|| bad_ambient(&s))?)?;
                    match r {
                        "Z" => AmbientGroup::SplitGroup(p),
                        "T" => AmbientGroup::SplitDual(p),
                        _ => return Err(bad_ambient(&s)),
                    }
                } else if let Some(x) = inside(&s, "Zp") {
                    AmbientGroup::PAdic(parse_u64(x)?)
                } else if let Some(x) = inside(&s, "Z").and_then(|x| x.strip_suffix("^inf")) {
                    AmbientGroup::Prufer(parse_u64(x)?)
                } else {
                    return Err(bad_ambient(&s));
                }
            }
        };
        out.validate()?;
        Ok(out)
    }
}

fn bad_ambient(s: &str) -> Error {
    Error::Parse(format!("unknown ambient group '{s}'"))
}

fn write_in(f: &mut fmt::Formatter<'_>, ambient: AmbientGroup, d: &D) -> fmt::Result {
    match (ambient, d) {
        (_, D::Zero) => write!(f, "0"),
        (a, D::Whole) => write!(f, "{a}"),
        (_, D::MultiplesOfQ(q)) => write!(f, "qZ({q})"),
        (_, D::CyclicInCircle(q)) => write!(f, "Z({q})"),
        (_, D::PruferInCircle(p)) => write!(f, "Z({p}^inf)"),
        (_, D::PAdicBall { p, v }) => write!(f, "p^{v}*Zp({p})"),
        (_, D::FiniteCyclicPrufer { p, c }) => write!(f, "Z({p}^{c})"),
        (AmbientGroup::SplitGroup(p) | AmbientGroup::SplitDual(p), D::SplitProduct(l, r)) => {
            match **l {
                D::Zero => write!(f, "0+")?,
                _ => write!(f, "Z({p})+")?,
            }
            let factor = if matches!(ambient, AmbientGroup::SplitGroup(_)) {
                AmbientGroup::Z
            } else {
                AmbientGroup::Circle
            };
            write_in(f, factor, r)
        }
        (_, D::SplitProduct(..)) => write!(f, "<invalid split product>"),
    }
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_in(f, self.ambient(), self.descriptor())
    }
}

impl serde::Serialize for Subgroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl serde::Serialize for AmbientGroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn parse_plain(ambient: AmbientGroup, s: &str) -> Result<D> {
    if s == "0" {
        return Ok(D::Zero);
    }
    if s == ambient.to_string() {
        return Ok(D::Whole);
    }
    if let Some(x) = inside(s, "qZ") {
        return Ok(D::MultiplesOfQ(parse_u64(x)?));
    }
    if let Some(rest) = s.strip_prefix("p^") {
        let (v, p) = rest
            .split_once("*Zp")
            .ok_or_else(|| Error::Parse(format!("bad p-adic ball '{s}'")))?;
        let p = parse_u64(
            p.strip_prefix('(')
                .and_then(|p| p.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("bad p-adic ball '{s}'")))?,
        )?;
        return Ok(D::PAdicBall { p, v: parse_u64(v)? });
    }
    if let Some(x) = inside(s, "Z") {
        return Ok(match x.split_once('^') {
            Some((p, "inf")) => D::PruferInCircle(parse_u64(p)?),
            Some((p, c)) => D::FiniteCyclicPrufer {
                p: parse_u64(p)?,
                c: parse_u64(c)?,
            },
            None => D::CyclicInCircle(parse_u64(x)?),
        });
    }
    Err(Error::Parse(format!("unknown subgroup '{s}' in {ambient}")))
}

impl Subgroup {
    /// Parses the canonical text of a subgroup of `ambient`.
    pub fn parse(ambient: AmbientGroup, text: &str) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let desc = match ambient {
            AmbientGroup::SplitGroup(p) | AmbientGroup::SplitDual(p) if s != "0" && s != ambient.to_string() => {
                let (l, r) = s
                    .split_once('+')
                    .ok_or_else(|| Error::Parse(format!("expected 'A+B' in {ambient}, got '{s}'")))?;
                let left = match l {
                    "0" => D::Zero,
                    x if x == format!("Z({p})") => D::Whole,
                    _ => return Err(Error::Parse(format!("bad torsion factor '{l}'"))),
                };
                let factor = if matches!(ambient, AmbientGroup::SplitGroup(_)) {
                    AmbientGroup::Z
                } else {
                    AmbientGroup::Circle
                };
                D::SplitProduct(Box::new(left), Box::new(parse_plain(factor, r)?))
            }
            // Whole ℤ(p^∞) and ℤ(p^∞) ⊂ 𝕋 share text; the ambient decides.
            AmbientGroup::Prufer(_) if s == ambient.to_string() => D::Whole,
            _ => parse_plain(ambient, &s)?,
        };
        Subgroup::new(ambient, desc)
    }
}

/// Parses an element of `ambient`. Accepted forms:
///
/// * ℤ and ℤ_p: integers; ℤ_p also takes `r mod p^N` for a truncated value
/// * 𝕋: `a/b` or an integer
/// * ℤ(p^∞): `a/b` with `b` a power of `p`, or an integer
/// * ℤ(p)⊕ℤ: `b`, `e`, `e+b`, `a*e-b` and so on
/// * ℤ(p)⊕𝕋: `(w, a/b)`
pub fn parse_element(ambient: AmbientGroup, text: &str) -> Result<Element> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty element".into()));
    }
    let int = |t: &str| BigInt::from_str(t).map_err(|_| Error::Parse(format!("bad integer '{t}' in '{text}'")));
    Ok(match ambient {
        AmbientGroup::Z => Element::Group(GroupElement::Int(int(&s)?)),
        AmbientGroup::Circle => Element::Dual(DualElement::Circle(CircleRational::from_str(&s)?)),
        AmbientGroup::PAdic(p) => match s.split_once("mod") {
            Some((r, m)) => {
                let (base, n) = m
                    .split_once('^')
                    .ok_or_else(|| Error::Parse(format!("expected 'r mod p^N', got '{text}'")))?;
                if parse_u64(base)? != p {
                    return Err(Error::Parse(format!("'{text}' is not {p}-adic")));
                }
                let t = TruncatedPAdic::new(p, parse_u64(n)?, &int(r)?);
                Element::Dual(DualElement::PAdic(PAdicValue::Truncated(t)))
            }
            None => Element::Dual(DualElement::padic(p, int(&s)?)),
        },
        AmbientGroup::Prufer(p) => {
            let x = CircleRational::from_str(&s)?;
            let v = PruferValue::from_circle(p, &x)
                .ok_or_else(|| Error::Parse(format!("denominator of '{text}' is not a power of {p}")))?;
            Element::Group(GroupElement::Prufer(v))
        }
        AmbientGroup::SplitGroup(p) => {
            let (torsion, free) = match s.find('e') {
                None => (0i64, int(&s)?),
                Some(at) => {
                    let coeff = match &s[..at] {
                        "" => 1,
                        "-" => -1,
                        c => c
                            .strip_suffix('*')
                            .ok_or_else(|| Error::Parse(format!("expected 'a*e', got '{text}'")))?
                            .parse::<i64>()
                            .map_err(|_| Error::Parse(format!("bad coefficient in '{text}'")))?,
                    };
                    let rest = &s[at + 1..];
                    let free = match rest {
                        "" => BigInt::from(0),
                        r if r.starts_with('+') => int(&r[1..])?,
                        r if r.starts_with('-') => int(r)?,
                        _ => return Err(Error::Parse(format!("expected '+b' or '-b' after e in '{text}'"))),
                    };
                    (coeff, free)
                }
            };
            Element::Group(GroupElement::split(p, torsion, free))
        }
        AmbientGroup::SplitDual(p) => {
            let body = s
                .strip_prefix('(')
                .and_then(|x| x.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("expected '(w, a/b)', got '{text}'")))?;
            let (w, x) = body
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("expected '(w, a/b)', got '{text}'")))?;
            let w = int(w)?;
            let omega = w.mod_floor(&BigInt::from(p));
            Element::Dual(DualElement::Split {
                p,
                omega: u64::try_from(&omega).expect("reduced mod p"),
                x: CircleRational::from_str(x)?,
            })
        }
    })
}

pub fn parse_group_element(ambient: AmbientGroup, text: &str) -> Result<GroupElement> {
    match parse_element(ambient, text)? {
        Element::Group(g) => Ok(g),
        Element::Dual(_) => Err(Error::Parse(format!("{ambient} is not a group of sequences"))),
    }
}

pub fn parse_dual_element(ambient: AmbientGroup, text: &str) -> Result<DualElement> {
    match parse_element(ambient, text)? {
        Element::Dual(d) => Ok(d),
        Element::Group(_) => Err(Error::Parse(format!("{ambient} is not a character group"))),
    }
}
