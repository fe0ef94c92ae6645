//! The three sequence families, generated exactly and memoized.
//!
//! Indexing is 1-based. Index `2n` is the even term of block `n` and index
//! `2n - 1` is the odd term of block `n`:
//!
//! | family | even term `d_{2n}` | odd term `d_{2n-1}` |
//! |---|---|---|
//! | `SplitSum(p, a)` in ℤ(p)⊕ℤ | `(0, p^n)` | `(a, f_n(p))` |
//! | `PruferSum(p, c)` in ℤ(p^∞) | `1/p^n` | `1/p^c + Σ_j 1/p^(n³-jn)` |
//! | `IntegerGamma(q, γ)` in ℤ | `q^n` | `γ + f_n(q)` |
//!
//! where `f_n(b) = Σ_{j=0}^{n} b^(n³ - j·n)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{is_prime, pow_u64, ExponentGuard, GroupElement, PruferValue};
use crate::groups::AmbientGroup;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum SequenceSpec {
    /// Odd terms carry `a_e` copies of the torsion generator `e`.
    SplitSum {
        p: u64,
        a_e: u64,
    },
    /// `u = 1/p^c` has order `p^c`.
    PruferSum {
        p: u64,
        c: u64,
    },
    IntegerGamma {
        q: u64,
        gamma: u64,
    },
}

impl SequenceSpec {
    pub fn split_sum(p: u64) -> Result<Self> {
        Self::SplitSum { p, a_e: 1 }.validated()
    }

    pub fn prufer_sum(p: u64, c: u64) -> Result<Self> {
        Self::PruferSum { p, c }.validated()
    }

    pub fn integer_gamma(q: u64, gamma: u64) -> Result<Self> {
        Self::IntegerGamma { q, gamma }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        match self {
            SequenceSpec::SplitSum { p, a_e } => {
                if !is_prime(p) {
                    return bad(format!("p = {p} is not prime"));
                }
                if a_e == 0 || a_e >= p {
                    return bad(format!("torsion coefficient {a_e} must lie in [1, {p})"));
                }
            }
            SequenceSpec::PruferSum { p, c } => {
                if !is_prime(p) {
                    return bad(format!("p = {p} is not prime"));
                }
                if c == 0 {
                    return bad("c must be at least 1".into());
                }
            }
            SequenceSpec::IntegerGamma { q, gamma } => {
                if q < 2 {
                    return bad(format!("q = {q} must be at least 2"));
                }
                if gamma == 0 {
                    return bad("gamma must be at least 1".into());
                }
            }
        }
        Ok(self)
    }

    /// The discrete group the sequence lives in.
    pub fn ambient(&self) -> AmbientGroup {
        match *self {
            SequenceSpec::SplitSum { p, .. } => AmbientGroup::SplitGroup(p),
            SequenceSpec::PruferSum { p, .. } => AmbientGroup::Prufer(p),
            SequenceSpec::IntegerGamma { .. } => AmbientGroup::Z,
        }
    }

    /// Base of the powers in the terms: `p` or `q`.
    pub fn base(&self) -> u64 {
        match *self {
            SequenceSpec::SplitSum { p, .. } | SequenceSpec::PruferSum { p, .. } => p,
            SequenceSpec::IntegerGamma { q, .. } => q,
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            SequenceSpec::SplitSum { .. } => "split-sum",
            SequenceSpec::PruferSum { .. } => "prufer-sum",
            SequenceSpec::IntegerGamma { .. } => "integer-gamma",
        }
    }
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceSpec::SplitSum { p, a_e: 1 } => write!(f, "SplitSum(p={p})"),
            SequenceSpec::SplitSum { p, a_e } => write!(f, "SplitSum(p={p}, a_e={a_e})"),
            SequenceSpec::PruferSum { p, c } => write!(f, "PruferSum(p={p}, c={c})"),
            SequenceSpec::IntegerGamma { q, gamma } => {
                write!(f, "IntegerGamma(q={q}, gamma={gamma})")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TermIndexMeta {
    pub index: u64,
    pub parity: Parity,
    pub block: u64,
    /// Number of summands, counting the leading `e`, `u` or `γ` of odd terms.
    pub summands: u64,
}

impl TermIndexMeta {
    pub fn of(index: u64) -> Result<Self> {
        if index == 0 {
            return Err(Error::InvalidParameter("sequence indices start at 1".into()));
        }
        Ok(if index.is_multiple_of(2) {
            Self {
                index,
                parity: Parity::Even,
                block: index / 2,
                summands: 1,
            }
        } else {
            let block = index.div_ceil(2);
            Self {
                index,
                parity: Parity::Odd,
                block,
                summands: block + 2,
            }
        })
    }

    pub fn even(block: u64) -> u64 {
        2 * block
    }

    pub fn odd(block: u64) -> u64 {
        2 * block - 1
    }
}

/// `Σ_{j=0}^{n} base^(n³ - j·n)`.
pub fn f_term(base: u64, n: u64, guard: &ExponentGuard) -> Result<BigInt> {
    if base < 2 || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "f_term needs base >= 2 and n >= 1, got base {base}, n {n}"
        )));
    }
    let top = n.checked_pow(3).ok_or(Error::ExponentTooLarge {
        base,
        exponent: u64::MAX,
        bits: u64::MAX,
        limit: guard.max_bits,
    })?;
    guard.check(base, top)?;
    // base^(n³-n²) · (1 + s + ... + s^n) with s = base^n.
    let s = pow_u64(base, n);
    let mut geom = BigInt::zero();
    for _ in 0..=n {
        geom = geom * &s + 1u32;
    }
    Ok(geom * pow_u64(base, top - n * n))
}

/// Term `d_index` of the sequence.
pub fn seq_term(spec: &SequenceSpec, index: u64, guard: &ExponentGuard) -> Result<GroupElement> {
    let meta = TermIndexMeta::of(index)?;
    let n = meta.block;
    Ok(match (*spec, meta.parity) {
        (SequenceSpec::SplitSum { p, .. }, Parity::Even) => GroupElement::Split {
            p,
            torsion: 0,
            free: guard.pow(p, n)?,
        },
        (SequenceSpec::SplitSum { p, a_e }, Parity::Odd) => GroupElement::Split {
            p,
            torsion: a_e % p,
            free: f_term(p, n, guard)?,
        },
        (SequenceSpec::IntegerGamma { q, .. }, Parity::Even) => GroupElement::Int(guard.pow(q, n)?),
        (SequenceSpec::IntegerGamma { q, gamma }, Parity::Odd) => GroupElement::Int(f_term(q, n, guard)? + gamma),
        (SequenceSpec::PruferSum { p, .. }, Parity::Even) => {
            guard.check(p, n)?;
            GroupElement::Prufer(PruferValue::one_over(p, n))
        }
        (SequenceSpec::PruferSum { p, c }, Parity::Odd) => {
            let top = n.pow(3);
            guard.check(p, top.max(c))?;
            // Σ_j p^(jn) / p^(n³), then add u = 1/p^c.
            let s = pow_u64(p, n);
            let mut num = BigInt::zero();
            for _ in 0..=n {
                num = num * &s + 1u32;
            }
            let tail = PruferValue::new(p, num, top);
            GroupElement::Prufer(tail.add(&PruferValue::one_over(p, c)))
        }
    })
}

/// Terms beyond this many are computed but not kept; sampled chains touch
/// scattered indices that are rarely reused.
const MEMO_CAPACITY: usize = 1024;

/// A sequence with a concurrent memo of its terms.
#[derive(Debug)]
pub struct Sequence {
    spec: SequenceSpec,
    guard: ExponentGuard,
    memo: RwLock<HashMap<u64, Arc<GroupElement>>>,
}

impl Sequence {
    pub fn new(spec: SequenceSpec, guard: ExponentGuard) -> Result<Self> {
        Ok(Self {
            spec: spec.validated()?,
            guard,
            memo: RwLock::new(HashMap::new()),
        })
    }

    pub fn spec(&self) -> &SequenceSpec {
        &self.spec
    }

    pub fn guard(&self) -> &ExponentGuard {
        &self.guard
    }

    pub fn term(&self, index: u64) -> Result<Arc<GroupElement>> {
        if let Some(t) = self.memo.read().expect("memo lock").get(&index) {
            return Ok(Arc::clone(t));
        }
        let t = Arc::new(seq_term(&self.spec, index, &self.guard)?);
        let mut memo = self.memo.write().expect("memo lock");
        if memo.len() >= MEMO_CAPACITY && !memo.contains_key(&index) {
            return Ok(t);
        }
        Ok(Arc::clone(memo.entry(index).or_insert(t)))
    }

    pub fn memo_len(&self) -> usize {
        self.memo.read().expect("memo lock").len()
    }

    /// The identity of the ambient group.
    pub fn zero(&self) -> GroupElement {
        match self.spec {
            SequenceSpec::SplitSum { p, .. } => GroupElement::split(p, 0, 0),
            SequenceSpec::PruferSum { p, .. } => GroupElement::Prufer(PruferValue::zero(p)),
            SequenceSpec::IntegerGamma { .. } => GroupElement::Int(BigInt::zero()),
        }
    }
}

/// The order of `u` in `PruferSum(p, c)` is `p^c`.
pub fn prufer_u(p: u64, c: u64) -> PruferValue {
    PruferValue::new(p, BigInt::one(), c)
}
