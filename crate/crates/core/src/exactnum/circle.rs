use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A rational point of the circle group 𝕋 = ℚ/ℤ in lowest terms.
///
/// Invariant: `0 <= num < den`, `gcd(num, den) = 1`; zero is `0/1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CircleRational {
    num: BigInt,
    den: BigInt,
}

impl CircleRational {
    pub fn zero() -> Self {
        Self {
            num: BigInt::zero(),
            den: BigInt::one(),
        }
    }

    /// `num/den mod 1`, reduced.
    pub fn new(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        let (num, den) = if den.is_negative() { (-num, -den) } else { (num, den) };
        let num = num.mod_floor(&den);
        let g = num.gcd(&den);
        if g.is_zero() {
            return Ok(Self::zero());
        }
        Ok(Self {
            num: num / &g,
            den: den / g,
        })
    }

    pub fn from_i64(num: i64, den: i64) -> Self {
        Self::new(BigInt::from(num), BigInt::from(den)).expect("non-zero denominator")
    }

    /// Caller guarantees the canonical-form invariant.
    pub(crate) fn from_reduced(num: BigInt, den: BigInt) -> Self {
        debug_assert!(!num.is_negative() && num < den);
        Self { num, den }
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.den == other.den {
            return Self::new(&self.num + &other.num, self.den.clone()).unwrap();
        }
        Self::new(&self.num * &other.den + &other.num * &self.den, &self.den * &other.den).unwrap()
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Self::from_reduced(&self.den - &self.num, self.den.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, n: &BigInt) -> Self {
        Self::new(n * &self.num, self.den.clone()).unwrap()
    }

    /// Distance to the identity, `min(x, 1 - x)`.
    pub fn norm(&self) -> BigRational {
        // min(a, d - a) stays coprime to d, so no reduction is needed
        BigRational::new_raw(self.norm_numer(), self.den.clone())
    }

    /// Numerator of [`CircleRational::norm`] over `denom()`.
    pub fn norm_numer(&self) -> BigInt {
        let twice = &self.num * 2u32;
        if twice > self.den {
            &self.den - &self.num
        } else {
            self.num.clone()
        }
    }

    /// Display form with huge parts abbreviated.
    pub fn summary(&self) -> String {
        if self.den.bits() <= crate::report::FULL_BITS {
            return self.to_string();
        }
        format!(
            "{}/{}",
            crate::report::big_text(&self.num),
            crate::report::big_text(&self.den)
        )
    }

    /// Representative in `[0, 1)` as an ordinary rational.
    pub fn to_rational(&self) -> BigRational {
        BigRational::new_raw(self.num.clone(), self.den.clone())
    }
}

pub fn circ_add(x: &CircleRational, y: &CircleRational) -> CircleRational {
    x.add(y)
}

pub fn circ_scale(n: &BigInt, x: &CircleRational) -> CircleRational {
    x.scale(n)
}

pub fn circ_norm(x: &CircleRational) -> BigRational {
    x.norm()
}

impl Ord for CircleRational {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl PartialOrd for CircleRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CircleRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for CircleRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse_int = |t: &str| BigInt::from_str(t.trim()).map_err(|_| Error::Parse(format!("bad integer '{t}'")));
        match s.split_once('/') {
            Some((a, b)) => Self::new(parse_int(a)?, parse_int(b)?),
            None => Self::new(parse_int(s)?, BigInt::one()),
        }
    }
}

impl serde::Serialize for CircleRational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.summary())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(a: i64, b: i64) -> CircleRational {
        CircleRational::from_i64(a, b)
    }

    #[test]
    fn addition_examples() {
        assert_eq!(circ_add(&c(1, 3), &c(1, 3)), c(2, 3));
        assert_eq!(circ_add(&c(1, 2), &c(1, 2)), CircleRational::zero());
        assert_eq!(circ_add(&c(2, 9), &c(2, 3)), c(8, 9));
    }

    #[test]
    fn scaling_examples() {
        assert_eq!(circ_scale(&BigInt::from(3), &c(1, 3)), CircleRational::zero());
        assert_eq!(circ_scale(&BigInt::from(5), &c(1, 3)), c(2, 3));
        assert_eq!(circ_scale(&BigInt::from(0), &c(7, 9)), CircleRational::zero());
        assert_eq!(circ_scale(&BigInt::from(-1), &c(1, 3)), c(2, 3));
    }

    #[test]
    fn norm_examples() {
        let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert_eq!(circ_norm(&CircleRational::zero()), r(0, 1));
        assert_eq!(circ_norm(&c(3, 4)), r(1, 4));
        assert_eq!(circ_norm(&c(1, 2)), r(1, 2));
    }

    #[test]
    fn canonical_form_from_unreduced_input() {
        let x = c(-14, 12);
        assert_eq!(x.numer(), &BigInt::from(5));
        assert_eq!(x.denom(), &BigInt::from(6));
        assert_eq!(c(6, -4), c(1, 2));
        assert_eq!(c(4, 2), CircleRational::zero());
    }

    #[test]
    fn parse_print() {
        assert_eq!("3/9".parse::<CircleRational>().unwrap(), c(1, 3));
        assert_eq!("0".parse::<CircleRational>().unwrap().to_string(), "0");
        assert_eq!(c(7, 8).to_string(), "7/8");
        assert!("1/0".parse::<CircleRational>().is_err());
        assert!("x/3".parse::<CircleRational>().is_err());
    }
}
