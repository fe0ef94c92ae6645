use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{pow_u64, valuation, CircleRational, ExponentGuard};

/// An element `num / p^exp` of the Prüfer group ℤ(p^∞).
///
/// Reduction only ever strips factors of `p`, so no gcd on huge operands
/// is needed. Invariant: `0 <= num < p^exp` and `p ∤ num` unless zero,
/// which is stored as `0 / p^0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PruferValue {
    p: u64,
    exp: u64,
    num: BigInt,
}

impl PruferValue {
    pub fn zero(p: u64) -> Self {
        Self {
            p,
            exp: 0,
            num: BigInt::zero(),
        }
    }

    /// `num / p^exp mod 1`, reduced.
    pub fn new(p: u64, num: BigInt, exp: u64) -> Self {
        let modulus = pow_u64(p, exp);
        Self::with_modulus(p, num, exp, &modulus)
    }

    /// Same as [`PruferValue::new`] with `p^exp` supplied by the caller.
    pub fn with_modulus(p: u64, num: BigInt, exp: u64, modulus: &BigInt) -> Self {
        let num = num.mod_floor(modulus);
        if num.is_zero() {
            return Self::zero(p);
        }
        let v = valuation(&num, p);
        if v == 0 {
            return Self { p, exp, num };
        }
        let num = num / pow_u64(p, v);
        Self { p, exp: exp - v, num }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Order of the element is `p^exponent()`.
    pub fn exponent(&self) -> u64 {
        self.exp
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "Prüfer values over different primes");
        let (hi, lo) = if self.exp >= other.exp {
            (self, other)
        } else {
            (other, self)
        };
        let shift = pow_u64(self.p, hi.exp - lo.exp);
        Self::new(self.p, &hi.num + &lo.num * shift, hi.exp)
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Self {
            p: self.p,
            exp: self.exp,
            num: pow_u64(self.p, self.exp) - &self.num,
        }
    }

    pub fn scale(&self, n: &BigInt) -> Self {
        Self::new(self.p, n * &self.num, self.exp)
    }

    /// Display form with huge parts abbreviated.
    pub fn summary(&self) -> String {
        if ExponentGuard::bits_of_power(self.p, self.exp) <= crate::report::FULL_BITS {
            return self.to_string();
        }
        format!("{}/{}^{}", crate::report::big_text(&self.num), self.p, self.exp)
    }

    pub fn to_circle(&self) -> CircleRational {
        if self.is_zero() {
            return CircleRational::zero();
        }
        CircleRational::from_reduced(self.num.clone(), pow_u64(self.p, self.exp))
    }

    /// Accepts a circle point whose reduced denominator is a power of `p`.
    pub fn from_circle(p: u64, x: &CircleRational) -> Option<Self> {
        if x.is_zero() {
            return Some(Self::zero(p));
        }
        let den = x.denom();
        let exp = valuation(den, p);
        if pow_u64(p, exp) != *den {
            return None;
        }
        Some(Self {
            p,
            exp,
            num: x.numer().clone(),
        })
    }

    pub fn one_over(p: u64, exp: u64) -> Self {
        Self::new(p, BigInt::one(), exp)
    }
}

impl fmt::Display for PruferValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.num, pow_u64(self.p, self.exp))
        }
    }
}
