//! Exact arithmetic: big integers, points of the circle group ℚ/ℤ, elements
//! of the Prüfer groups and p-adic characters, and the character pairings
//! between every supported group and its dual.
//!
//! Circle values are kept additively, so "the pairing tends to 1" is
//! expressed as "the circle norm tends to 0".

mod circle;
mod element;
mod padic;
mod prufer;

pub use circle::{circ_add, circ_norm, circ_scale, CircleRational};
pub use element::{pairing, DualElement, GroupElement};
pub use padic::{PAdicValue, TruncatedPAdic};
pub use prufer::PruferValue;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub use num_bigint::BigInt as BigInteger;

/// Default magnitude cap for any single power: 2^21 bits.
pub const DEFAULT_GUARD_BITS: u64 = 1 << 21;

/// Caps the size of every power the library materializes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct ExponentGuard {
    pub max_bits: u64,
}

impl Default for ExponentGuard {
    fn default() -> Self {
        Self {
            max_bits: DEFAULT_GUARD_BITS,
        }
    }
}

impl ExponentGuard {
    pub fn new(max_bits: u64) -> Self {
        Self { max_bits }
    }

    /// Approximate bit length of `base^exponent`, rounded up.
    pub fn bits_of_power(base: u64, exponent: u64) -> u64 {
        if base <= 1 || exponent == 0 {
            return 1;
        }
        ((exponent as f64) * (base as f64).log2()).ceil() as u64 + 1
    }

    pub fn check(&self, base: u64, exponent: u64) -> Result<()> {
        let bits = Self::bits_of_power(base, exponent);
        if bits > self.max_bits {
            return Err(Error::ExponentTooLarge {
                base,
                exponent,
                bits,
                limit: self.max_bits,
            });
        }
        Ok(())
    }

    /// `base^exponent` after the guard check.
    pub fn pow(&self, base: u64, exponent: u64) -> Result<BigInt> {
        self.check(base, exponent)?;
        Ok(pow_u64(base, exponent))
    }
}

/// Unguarded `base^exponent`; callers are responsible for sizes.
pub fn pow_u64(base: u64, exponent: u64) -> BigInt {
    let exp = u32::try_from(exponent).expect("exponent fits in u32");
    num_traits::pow::pow(BigInt::from(base), exp as usize)
}

/// p-adic valuation of a non-zero integer. Uses repeated squaring of `p`
/// so the cost is logarithmic in the valuation.
pub fn valuation(x: &BigInt, p: u64) -> u64 {
    assert!(!x.is_zero(), "valuation of zero is infinite");
    if p == 2 {
        return x.trailing_zeros().unwrap_or(0);
    }
    let mut rest = x.abs();
    let mut powers = vec![BigInt::from(p)];
    let mut v = 0u64;
    loop {
        let top = powers.last().unwrap();
        let (q, r) = rest.div_rem(top);
        if !r.is_zero() {
            break;
        }
        rest = q;
        v += 1u64 << (powers.len() - 1);
        let sq = top * top;
        if sq.bits() > rest.bits() {
            break;
        }
        powers.push(sq);
    }
    for i in (0..powers.len()).rev() {
        loop {
            let (q, r) = rest.div_rem(&powers[i]);
            if !r.is_zero() {
                break;
            }
            rest = q;
            v += 1u64 << i;
        }
    }
    v
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Whether every prime factor of `n` divides `base`.
pub fn is_smooth_over(n: &BigInt, base: u64) -> bool {
    smooth_split(n, base).1.is_one()
}

/// Splits `n > 0` as `smooth * coprime` where `smooth` collects the primes
/// dividing `base` and `coprime` is prime to `base`.
pub fn smooth_split(n: &BigInt, base: u64) -> (BigInt, BigInt) {
    let mut coprime = n.abs();
    let mut smooth = BigInt::one();
    for p in prime_factors(base) {
        let bp = BigInt::from(p);
        loop {
            let (q, r) = coprime.div_rem(&bp);
            if !r.is_zero() {
                break;
            }
            coprime = q;
            smooth *= &bp;
        }
    }
    (smooth, coprime)
}

/// Smallest `e` with `n | base^e`, if `n` is `base`-smooth.
pub fn smooth_exponent(n: &BigInt, base: u64) -> Option<u64> {
    if !is_smooth_over(n, base) {
        return None;
    }
    let b = BigInt::from(base);
    let mut acc = BigInt::one();
    let mut e = 0u64;
    while !(&acc % n).is_zero() {
        acc *= &b;
        e += 1;
    }
    Some(e)
}
