use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::pow_u64;
use crate::error::{Error, Result};

/// A p-adic integer known modulo `p^precision`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruncatedPAdic {
    p: u64,
    precision: u64,
    residue: BigInt,
}

impl TruncatedPAdic {
    pub fn new(p: u64, precision: u64, value: &BigInt) -> Self {
        let residue = value.mod_floor(&pow_u64(p, precision));
        Self { p, precision, residue }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u64 {
        self.precision
    }

    pub fn residue(&self) -> &BigInt {
        &self.residue
    }

    /// Base-p digits, least significant first, `precision` of them.
    pub fn digits(&self) -> Vec<u64> {
        let bp = BigInt::from(self.p);
        let mut rest = self.residue.clone();
        (0..self.precision)
            .map(|_| {
                let (q, r) = rest.div_rem(&bp);
                rest = q;
                u64::try_from(r).unwrap()
            })
            .collect()
    }

    pub fn residue_mod(&self, k: u64) -> Result<BigInt> {
        if k > self.precision {
            return Err(Error::PrecisionExhausted {
                needed: k,
                available: self.precision,
            });
        }
        Ok(self.residue.mod_floor(&pow_u64(self.p, k)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let precision = self.precision.min(other.precision);
        Self::new(self.p, precision, &(&self.residue + &other.residue))
    }

    pub fn neg(&self) -> Self {
        Self::new(self.p, self.precision, &-&self.residue)
    }
}

/// A character of ℤ(p^∞), i.e. a p-adic integer. Exact integers are never
/// truncated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PAdicValue {
    Exact { p: u64, value: BigInt },
    Truncated(TruncatedPAdic),
}

impl PAdicValue {
    pub fn exact(p: u64, value: impl Into<BigInt>) -> Self {
        PAdicValue::Exact { p, value: value.into() }
    }

    pub fn p(&self) -> u64 {
        match self {
            PAdicValue::Exact { p, .. } => *p,
            PAdicValue::Truncated(t) => t.p(),
        }
    }

    pub fn as_integer(&self) -> Option<&BigInt> {
        match self {
            PAdicValue::Exact { value, .. } => Some(value),
            PAdicValue::Truncated(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            PAdicValue::Exact { value, .. } => value.is_zero(),
            PAdicValue::Truncated(t) => t.residue().is_zero(),
        }
    }

    /// The value modulo `p^k`, in `[0, p^k)`.
    pub fn residue_mod(&self, k: u64) -> Result<BigInt> {
        match self {
            PAdicValue::Exact { p, value } => Ok(value.mod_floor(&pow_u64(*p, k))),
            PAdicValue::Truncated(t) => t.residue_mod(k),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (PAdicValue::Exact { p, value: a }, PAdicValue::Exact { value: b, .. }) => {
                PAdicValue::Exact { p: *p, value: a + b }
            }
            (PAdicValue::Truncated(a), PAdicValue::Truncated(b)) => PAdicValue::Truncated(a.add(b)),
            (PAdicValue::Exact { p, value }, PAdicValue::Truncated(t))
            | (PAdicValue::Truncated(t), PAdicValue::Exact { p, value }) => {
                PAdicValue::Truncated(TruncatedPAdic::new(*p, t.precision(), value).add(t))
            }
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            PAdicValue::Exact { p, value } => PAdicValue::Exact { p: *p, value: -value },
            PAdicValue::Truncated(t) => PAdicValue::Truncated(t.neg()),
        }
    }
}

impl fmt::Display for PAdicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PAdicValue::Exact { value, .. } => write!(f, "{value}"),
            PAdicValue::Truncated(t) => {
                write!(f, "{} mod {}^{}", t.residue(), t.p(), t.precision())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_of_minus_one() {
        let t = TruncatedPAdic::new(3, 4, &BigInt::from(-1));
        assert_eq!(t.digits(), vec![2, 2, 2, 2]);
        assert_eq!(t.residue(), &BigInt::from(80));
    }

    #[test]
    fn precision_is_enforced() {
        let t = TruncatedPAdic::new(2, 3, &BigInt::from(5));
        assert_eq!(t.residue_mod(2).unwrap(), BigInt::from(1));
        assert_eq!(
            t.residue_mod(4),
            Err(Error::PrecisionExhausted {
                needed: 4,
                available: 3
            })
        );
    }

    #[test]
    fn mixed_addition_truncates() {
        let a = PAdicValue::exact(2, 7);
        let b = PAdicValue::Truncated(TruncatedPAdic::new(2, 3, &BigInt::from(3)));
        let s = a.add(&b);
        assert_eq!(s.residue_mod(3).unwrap(), BigInt::from(2));
        assert!(s.residue_mod(4).is_err());
    }
}
