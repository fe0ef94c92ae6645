use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::exactnum::pow_u64;
use crate::report::big_text;

/// An exact rational `num/den` with `den > 0`, kept unreduced. Comparison
/// is by cross-multiplication, so no gcd of huge operands is ever taken.
#[derive(Debug, Clone)]
pub struct Exact {
    num: BigInt,
    den: BigInt,
}

impl Exact {
    pub fn int(x: impl Into<BigInt>) -> Self {
        Self {
            num: x.into(),
            den: BigInt::one(),
        }
    }

    pub fn frac(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        let (num, den) = (num.into(), den.into());
        assert!(!den.is_zero(), "zero denominator");
        if den.is_negative() {
            Self { num: -num, den: -den }
        } else {
            Self { num, den }
        }
    }

    pub fn pfrac(f: &PFrac) -> Self {
        Self::frac(f.num.clone(), pow_u64(f.p, f.exp))
    }

    pub fn text(&self) -> String {
        if self.den.is_one() {
            big_text(&self.num)
        } else {
            format!("{}/{}", big_text(&self.num), big_text(&self.den))
        }
    }
}

impl PartialEq for Exact {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Exact {}

impl PartialOrd for Exact {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Exact {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.den == other.den {
            return self.num.cmp(&other.num);
        }
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

/// `num / p^exp`, unreduced and signed; the rational values of Prüfer terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PFrac {
    pub p: u64,
    pub num: BigInt,
    pub exp: u64,
}

impl PFrac {
    pub fn zero(p: u64) -> Self {
        Self {
            p,
            num: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn new(p: u64, num: impl Into<BigInt>, exp: u64) -> Self {
        Self {
            p,
            num: num.into(),
            exp,
        }
    }

    /// Same value written over `p^exp`, which must not be below `self.exp`.
    pub fn aligned(&self, exp: u64) -> BigInt {
        assert!(exp >= self.exp);
        &self.num * pow_u64(self.p, exp - self.exp)
    }

    pub fn add(&self, other: &Self) -> Self {
        let exp = self.exp.max(other.exp);
        Self::new(self.p, self.aligned(exp) + other.aligned(exp), exp)
    }

    pub fn scale(&self, l: i64) -> Self {
        Self::new(self.p, &self.num * l, self.exp)
    }

    pub fn abs(&self) -> Self {
        Self::new(self.p, self.num.abs(), self.exp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
}

impl Relation {
    pub fn test(self, o: Ordering) -> bool {
        match self {
            Relation::Lt => o == Ordering::Less,
            Relation::Le => o != Ordering::Greater,
            Relation::Gt => o == Ordering::Greater,
            Relation::Ge => o != Ordering::Less,
            Relation::Eq => o == Ordering::Equal,
            Relation::Ne => o != Ordering::Equal,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Gt => ">",
            Relation::Ge => ">=",
            Relation::Eq => "=",
            Relation::Ne => "!=",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// One evaluated link of a chain.
#[derive(Debug, Clone, Serialize)]
pub struct InequalityLine {
    pub statement: String,
    pub left: String,
    pub relation: Relation,
    pub right: String,
    pub holds: bool,
}

#[derive(Debug, Default)]
pub(crate) struct Lines(pub Vec<InequalityLine>);

impl Lines {
    pub fn cmp(&mut self, statement: &str, left: Exact, rel: Relation, right: Exact) {
        let holds = rel.test(left.cmp(&right));
        self.0.push(InequalityLine {
            statement: statement.to_string(),
            left: left.text(),
            relation: rel,
            right: right.text(),
            holds,
        });
    }

    pub fn ints(&mut self, statement: &str, left: impl Into<BigInt>, rel: Relation, right: impl Into<BigInt>) {
        self.cmp(statement, Exact::int(left), rel, Exact::int(right));
    }

    pub fn fact(&mut self, statement: &str, left: String, rel: Relation, right: String, holds: bool) {
        self.0.push(InequalityLine {
            statement: statement.to_string(),
            left,
            relation: rel,
            right,
            holds,
        });
    }
}
