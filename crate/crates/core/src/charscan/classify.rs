use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{pow_u64, smooth_exponent, smooth_split, CircleRational, DualElement, PAdicValue};
use crate::report::{ser_big, ser_rational};
use crate::sequences::{Parity, SequenceSpec, TermIndexMeta};

/// Largest modulus for which the multiplicative period of a recurring value
/// is computed by iteration.
const MAX_PERIOD_MODULUS: u64 = 1 << 22;

/// An explicit upper bound on the circle norm of a pairing value at block `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decay {
    #[serde(serialize_with = "ser_big")]
    pub scale: BigInt,
    pub base: u64,
    pub shape: DecayShape,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayShape {
    /// norm equals `scale / base^n` exactly
    Geometric,
    /// norm is at most `scale·(n+1) / base^(n³-n²)`
    CubicTail,
}

impl Decay {
    /// The bound at block `n` as an unreduced fraction.
    pub fn bound_parts(&self, block: u64) -> (BigInt, BigInt) {
        let b = BigInt::from(self.base);
        match self.shape {
            DecayShape::Geometric => (self.scale.clone(), num_traits::pow(b, block as usize)),
            DecayShape::CubicTail => {
                let e = block * block * block - block * block;
                (&self.scale * BigInt::from(block + 1), num_traits::pow(b, e as usize))
            }
        }
    }

    pub fn bound(&self, block: u64) -> BigRational {
        let (n, d) = self.bound_parts(block);
        BigRational::new(n, d)
    }

    /// Whether a value of circle norm `num/den` satisfies the bound at
    /// block `n`. Compared by cross-multiplication.
    pub fn admits_norm(&self, block: u64, num: &BigInt, den: &BigInt) -> bool {
        let (bn, bd) = self.bound_parts(block);
        let lhs = num * &bd;
        let rhs = &bn * den;
        match self.shape {
            DecayShape::Geometric => lhs == rhs,
            DecayShape::CubicTail => lhs <= rhs,
        }
    }

    pub fn admits(&self, block: u64, value: &CircleRational) -> bool {
        self.admits_norm(block, &value.norm_numer(), value.denom())
    }

    /// Whether the circle distance between `value` and `limit` satisfies the
    /// bound at block `n`, without reducing the difference.
    pub fn admits_distance(&self, block: u64, value: &CircleRational, limit: &CircleRational) -> bool {
        let den = value.denom() * limit.denom();
        let diff = (value.numer() * limit.denom() - limit.numer() * value.denom()).mod_floor(&den);
        let twice = &diff * 2u32;
        let num = if twice > den { &den - &diff } else { diff };
        self.admits_norm(block, &num, &den)
    }
}

/// Why a pairing sequence fails to converge to 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NonConvergenceWitness {
    /// `value` is taken at every index `start + i·step`.
    Recurring {
        value: CircleRational,
        start: u64,
        step: u64,
    },
    /// Every index `start + i·step` has norm at least `floor`.
    BoundedAway {
        limit: Option<CircleRational>,
        start: u64,
        step: u64,
        #[serde(serialize_with = "ser_rational")]
        floor: BigRational,
    },
}

/// Limit behaviour of `(d_n, χ)` along a subsequence or the whole sequence.
/// All indices are sequence indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum ConvergenceClass {
    EventuallyZero {
        from: u64,
    },
    NullByDecay {
        from: u64,
        even: Option<Decay>,
        odd: Option<Decay>,
    },
    ConvergesToNonzero {
        limit: CircleRational,
        from: u64,
        /// `None` when the values equal the limit exactly from `from` on
        tail: Option<Decay>,
    },
    NonConvergent {
        witness: NonConvergenceWitness,
    },
    Inconclusive {
        evaluated: Option<u64>,
    },
}

impl ConvergenceClass {
    pub fn is_null(&self) -> bool {
        matches!(
            self,
            ConvergenceClass::EventuallyZero { .. } | ConvergenceClass::NullByDecay { .. }
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            ConvergenceClass::EventuallyZero { .. } => "eventually-zero",
            ConvergenceClass::NullByDecay { .. } => "null-by-decay",
            ConvergenceClass::ConvergesToNonzero { .. } => "converges-to-nonzero",
            ConvergenceClass::NonConvergent { .. } => "non-convergent",
            ConvergenceClass::Inconclusive { .. } => "inconclusive",
        }
    }

    fn start_index(&self) -> u64 {
        match self {
            ConvergenceClass::EventuallyZero { from }
            | ConvergenceClass::NullByDecay { from, .. }
            | ConvergenceClass::ConvergesToNonzero { from, .. } => *from,
            _ => 1,
        }
    }
}

/// Classes of the even and odd subsequences and of the whole sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairingLimit {
    pub even: ConvergenceClass,
    pub odd: ConvergenceClass,
    pub overall: ConvergenceClass,
}

impl PairingLimit {
    pub fn is_member(&self) -> bool {
        self.overall.is_null()
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self.overall, ConvergenceClass::Inconclusive { .. })
    }
}

/// Class of the whole pairing sequence `(d_n, χ)`.
pub fn classify_pairing_limit(spec: &SequenceSpec, chi: &DualElement) -> Result<ConvergenceClass> {
    Ok(classify_subsequences(spec, chi)?.overall)
}

/// Classes of both subsequences, combined into the class of the whole
/// sequence. χ belongs to the characterized subgroup iff both tend to 0.
pub fn classify_subsequences(spec: &SequenceSpec, chi: &DualElement) -> Result<PairingLimit> {
    let (even, odd) = match (*spec, chi) {
        (SequenceSpec::IntegerGamma { q, gamma }, DualElement::Circle(x)) => {
            let limit = x.scale(&BigInt::from(gamma));
            integer_type(q, x, limit)
        }
        (SequenceSpec::SplitSum { p, a_e }, DualElement::Split { p: pd, omega, x }) if p == *pd => {
            let limit = CircleRational::new(BigInt::from(a_e * omega), BigInt::from(p))?;
            integer_type(p, x, limit)
        }
        (SequenceSpec::PruferSum { p, c }, DualElement::PAdic(v)) if v.p() == p => prufer_type(p, c, v)?,
        _ => {
            return Err(Error::MismatchedAmbient(format!(
                "character {chi} does not pair with {spec}"
            )))
        }
    };
    let overall = combine(&even, &odd);
    Ok(PairingLimit { even, odd, overall })
}

fn block_of(index: u64) -> u64 {
    index.div_ceil(2)
}

/// Multiplicative order of `base` modulo `m`, for `m > 1` coprime to `base`.
fn multiplicative_order(base: u64, m: u64) -> Option<u64> {
    if m > MAX_PERIOD_MODULUS {
        return None;
    }
    let b = base % m;
    let mut acc = b;
    let mut k = 1u64;
    while acc != 1 {
        acc = ((acc as u128 * b as u128) % m as u128) as u64;
        k += 1;
        if k > m {
            return None;
        }
    }
    Some(k)
}

/// Even terms `P^n`, odd terms `c + Σ_j P^(n³-jn)` whose constant pairs to
/// `limit`.
fn integer_type(base: u64, x: &CircleRational, limit: CircleRational) -> (ConvergenceClass, ConvergenceClass) {
    let d = x.denom();
    let (smooth, coprime) = smooth_split(d, base);
    if coprime.is_one() {
        let n0 = smooth_exponent(d, base).expect("smooth denominator");
        let even = ConvergenceClass::EventuallyZero {
            from: TermIndexMeta::even(n0.max(1)),
        };
        // every summand of f_n is a multiple of P^(n³-n²)
        let mut n = 1u64;
        while n * n * n - n * n < n0 {
            n += 1;
        }
        let from = TermIndexMeta::odd(n);
        let odd = if limit.is_zero() {
            ConvergenceClass::EventuallyZero { from }
        } else {
            ConvergenceClass::ConvergesToNonzero {
                limit,
                from,
                tail: None,
            }
        };
        return (even, odd);
    }
    let n0 = smooth_exponent(&smooth, base).expect("smooth part").max(1);
    let value = x.scale(&pow_u64(base, n0));
    let even_witness = match coprime
        .to_string()
        .parse::<u64>()
        .ok()
        .and_then(|m| multiplicative_order(base, m))
    {
        Some(period) => NonConvergenceWitness::Recurring {
            value,
            start: TermIndexMeta::even(n0),
            step: 2 * period,
        },
        // the reduced denominator stays exactly `coprime`
        None => NonConvergenceWitness::BoundedAway {
            limit: None,
            start: TermIndexMeta::even(n0),
            step: 2,
            floor: BigRational::new(BigInt::one(), coprime),
        },
    };
    (
        ConvergenceClass::NonConvergent { witness: even_witness },
        ConvergenceClass::Inconclusive { evaluated: None },
    )
}

fn prufer_type(p: u64, c: u64, v: &PAdicValue) -> Result<(ConvergenceClass, ConvergenceClass)> {
    let z = match v {
        PAdicValue::Exact { value, .. } => value.clone(),
        PAdicValue::Truncated(t) => {
            if t.precision() < c {
                return Err(Error::UnsupportedCharacter(format!(
                    "p-adic character known to {} digits cannot fix the limit at order p^{c}",
                    t.precision()
                )));
            }
            let evaluated = Some(t.precision());
            return Ok((
                ConvergenceClass::Inconclusive { evaluated },
                ConvergenceClass::Inconclusive { evaluated },
            ));
        }
    };
    if z.is_zero() {
        return Ok((
            ConvergenceClass::EventuallyZero { from: 2 },
            ConvergenceClass::EventuallyZero { from: 1 },
        ));
    }
    let scale = z.abs();
    let two_z = &scale * 2;
    let mut n = 1u64;
    while pow_u64(p, n) <= two_z {
        n += 1;
    }
    let even = ConvergenceClass::NullByDecay {
        from: TermIndexMeta::even(n),
        even: Some(Decay {
            scale: scale.clone(),
            base: p,
            shape: DecayShape::Geometric,
        }),
        odd: None,
    };
    let tail = Decay {
        scale,
        base: p,
        shape: DecayShape::CubicTail,
    };
    let limit = CircleRational::new(z, pow_u64(p, c))?;
    let odd = if limit.is_zero() {
        ConvergenceClass::NullByDecay {
            from: 1,
            even: None,
            odd: Some(tail),
        }
    } else {
        ConvergenceClass::ConvergesToNonzero {
            limit,
            from: 1,
            tail: Some(tail),
        }
    };
    Ok((even, odd))
}

fn combine(even: &ConvergenceClass, odd: &ConvergenceClass) -> ConvergenceClass {
    use ConvergenceClass as C;
    match (even, odd) {
        (C::NonConvergent { .. }, _) => even.clone(),
        (C::Inconclusive { .. }, _) | (_, C::Inconclusive { .. }) => C::Inconclusive {
            evaluated: match (even, odd) {
                (C::Inconclusive { evaluated }, _) | (_, C::Inconclusive { evaluated }) => *evaluated,
                _ => None,
            },
        },
        (C::EventuallyZero { from: a }, C::EventuallyZero { from: b }) => C::EventuallyZero { from: (*a).max(*b) },
        (e, o) if e.is_null() && o.is_null() => {
            let decay_of = |c: &C, parity: Parity| match c {
                C::NullByDecay { even, odd, .. } => match parity {
                    Parity::Even => even.clone(),
                    Parity::Odd => odd.clone(),
                },
                _ => None,
            };
            C::NullByDecay {
                from: e.start_index().max(o.start_index()),
                even: decay_of(e, Parity::Even),
                odd: decay_of(o, Parity::Odd),
            }
        }
        (_, C::ConvergesToNonzero { limit, from, tail }) => {
            let witness = match tail {
                None => NonConvergenceWitness::Recurring {
                    value: limit.clone(),
                    start: *from,
                    step: 2,
                },
                Some(decay) => {
                    let floor = limit.norm() / BigInt::from(2);
                    let mut n = block_of(*from);
                    while decay.bound(n) > floor {
                        n += 1;
                    }
                    NonConvergenceWitness::BoundedAway {
                        limit: Some(limit.clone()),
                        start: TermIndexMeta::odd(n),
                        step: 2,
                        floor,
                    }
                }
            };
            C::NonConvergent { witness }
        }
        _ => C::Inconclusive { evaluated: None },
    }
}

/// Checks a class against directly evaluated values `(index, value)` of the
/// matching subsequence (or the whole sequence for `overall`). Returns the
/// indices at which the stated witness is violated.
pub fn witness_violations(class: &ConvergenceClass, values: &[(u64, CircleRational)]) -> Vec<u64> {
    let mut bad = Vec::new();
    for (index, value) in values {
        let block = block_of(*index);
        let parity = if index % 2 == 0 { Parity::Even } else { Parity::Odd };
        let ok = match class {
            ConvergenceClass::EventuallyZero { from } => *index < *from || value.is_zero(),
            ConvergenceClass::NullByDecay { from, even, odd } => {
                let decay = match parity {
                    Parity::Even => even,
                    Parity::Odd => odd,
                };
                *index < *from
                    || match decay {
                        Some(d) => d.admits(block, value),
                        None => value.is_zero(),
                    }
            }
            ConvergenceClass::ConvergesToNonzero { limit, from, tail } => {
                *index < *from
                    || match tail {
                        None => value == limit,
                        Some(d) => d.admits_distance(block, value, limit),
                    }
            }
            ConvergenceClass::NonConvergent { witness } => match witness {
                NonConvergenceWitness::Recurring { value: v, start, step } => {
                    !on_progression(*index, *start, *step) || value == v
                }
                NonConvergenceWitness::BoundedAway { start, step, floor, .. } => {
                    !on_progression(*index, *start, *step)
                        || value.norm_numer() * floor.denom() >= floor.numer() * value.denom()
                }
            },
            ConvergenceClass::Inconclusive { .. } => true,
        };
        if !ok {
            bad.push(*index);
        }
    }
    bad
}

fn on_progression(index: u64, start: u64, step: u64) -> bool {
    index >= start && (index - start).is_multiple_of(step)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn third_is_eventually_zero_for_gamma_equal_q() {
        let spec = SequenceSpec::integer_gamma(3, 3).unwrap();
        let c = classify_pairing_limit(&spec, &DualElement::circle(1, 3)).unwrap();
        assert!(matches!(c, ConvergenceClass::EventuallyZero { .. }));
    }

    #[test]
    fn half_recurs_under_powers_of_three() {
        let spec = SequenceSpec::integer_gamma(3, 3).unwrap();
        let c = classify_pairing_limit(&spec, &DualElement::circle(1, 2)).unwrap();
        assert_eq!(
            c,
            ConvergenceClass::NonConvergent {
                witness: NonConvergenceWitness::Recurring {
                    value: CircleRational::from_i64(1, 2),
                    start: 2,
                    step: 2,
                }
            }
        );
    }

    #[test]
    fn gamma_one_keeps_third_out() {
        let spec = SequenceSpec::integer_gamma(3, 1).unwrap();
        let l = classify_subsequences(&spec, &DualElement::circle(1, 3)).unwrap();
        assert!(l.even.is_null());
        assert!(!l.is_member());
        assert!(matches!(
            l.overall,
            ConvergenceClass::NonConvergent {
                witness: NonConvergenceWitness::Recurring { .. }
            }
        ));
    }

    #[test]
    fn even_integer_is_member_for_prufer_two() {
        let spec = SequenceSpec::prufer_sum(2, 1).unwrap();
        let l = classify_subsequences(&spec, &DualElement::padic(2, 2)).unwrap();
        assert!(matches!(l.even, ConvergenceClass::NullByDecay { .. }));
        assert!(l.is_member());
        let l = classify_subsequences(&spec, &DualElement::padic(2, 3)).unwrap();
        assert!(matches!(
            l.overall,
            ConvergenceClass::NonConvergent {
                witness: NonConvergenceWitness::BoundedAway { .. }
            }
        ));
    }

    #[test]
    fn split_sum_needs_zero_torsion() {
        let spec = SequenceSpec::split_sum(2).unwrap();
        let member = DualElement::Split {
            p: 2,
            omega: 0,
            x: CircleRational::from_i64(3, 8),
        };
        let outsider = DualElement::Split {
            p: 2,
            omega: 1,
            x: CircleRational::from_i64(3, 8),
        };
        assert!(classify_subsequences(&spec, &member).unwrap().is_member());
        assert!(!classify_subsequences(&spec, &outsider).unwrap().is_member());
    }

    #[test]
    fn truncated_characters_are_inconclusive_or_unsupported() {
        use crate::exactnum::TruncatedPAdic;
        let spec = SequenceSpec::prufer_sum(3, 2).unwrap();
        let short = DualElement::PAdic(PAdicValue::Truncated(TruncatedPAdic::new(3, 1, &BigInt::from(4))));
        assert!(matches!(
            classify_pairing_limit(&spec, &short),
            Err(Error::UnsupportedCharacter(_))
        ));
        let long = DualElement::PAdic(PAdicValue::Truncated(TruncatedPAdic::new(3, 8, &BigInt::from(4))));
        assert!(matches!(
            classify_pairing_limit(&spec, &long).unwrap(),
            ConvergenceClass::Inconclusive { evaluated: Some(8) }
        ));
    }

    #[test]
    fn mismatched_character_is_rejected() {
        let spec = SequenceSpec::split_sum(3).unwrap();
        assert!(matches!(
            classify_pairing_limit(&spec, &DualElement::circle(1, 3)),
            Err(Error::MismatchedAmbient(_))
        ));
    }
}
