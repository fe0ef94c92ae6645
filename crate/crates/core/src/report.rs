//! Helpers for rendering exact values in machine-readable reports.
//!
//! Values up to [`FULL_BITS`] bits are written out in decimal. Larger ones
//! are summarized by bit length and a base-2 logarithm, since decimal
//! conversion of megabit integers is quadratic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serializer;

pub const FULL_BITS: u64 = 512;

pub fn big_text(x: &BigInt) -> String {
    if x.bits() <= FULL_BITS {
        return x.to_string();
    }
    let sign = if x.is_negative() { "-" } else { "" };
    format!("{sign}~2^{:.4} ({} bits)", log2_abs(x), x.bits())
}

pub fn rational_text(x: &BigRational) -> String {
    if x.denom() == &BigInt::from(1) {
        big_text(x.numer())
    } else {
        format!("{}/{}", big_text(x.numer()), big_text(x.denom()))
    }
}

/// `log2 |x|` to double precision, for any size of `x`.
pub fn log2_abs(x: &BigInt) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    let shift = bits.saturating_sub(64);
    let top: BigInt = x.abs() >> shift;
    let top = u64::try_from(top).unwrap() as f64;
    top.log2() + shift as f64
}

pub fn ser_big<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&big_text(x))
}

pub fn ser_rational<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rational_text(x))
}
