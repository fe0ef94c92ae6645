use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::GroupElement;
use crate::sequences::{Parity, Sequence, TermIndexMeta};

/// `(block, coeff)` pairs of one parity.
pub type BlockTerms = Vec<(u64, i64)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PatternTerm {
    pub index: u64,
    pub coeff: i64,
}

/// A signed combination `Σ l_i d_{n_i}` with strictly increasing indices
/// and non-zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct SumPattern {
    terms: Vec<PatternTerm>,
}

impl SumPattern {
    pub fn empty() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn new(terms: Vec<(u64, i64)>) -> Result<Self> {
        let terms: Vec<PatternTerm> = terms
            .into_iter()
            .map(|(index, coeff)| PatternTerm { index, coeff })
            .collect();
        for t in &terms {
            if t.coeff == 0 {
                return Err(Error::InvalidParameter(format!("zero coefficient on d{}", t.index)));
            }
            if t.index == 0 {
                return Err(Error::InvalidParameter("sequence indices start at 1".into()));
            }
        }
        if terms.windows(2).any(|w| w[0].index >= w[1].index) {
            return Err(Error::InvalidParameter(
                "pattern indices must be strictly increasing".into(),
            ));
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[PatternTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// `Σ |l_i|`.
    pub fn weight(&self) -> u64 {
        self.terms.iter().map(|t| t.coeff.unsigned_abs()).sum()
    }

    pub fn min_index(&self) -> Option<u64> {
        self.terms.first().map(|t| t.index)
    }

    pub fn max_index(&self) -> Option<u64> {
        self.terms.last().map(|t| t.index)
    }

    /// `(block, coeff)` pairs of the odd and even terms, in index order.
    pub fn split_parity(&self) -> (BlockTerms, BlockTerms) {
        let mut odd = Vec::new();
        let mut even = Vec::new();
        for t in &self.terms {
            let meta = TermIndexMeta::of(t.index).expect("indices are positive");
            match meta.parity {
                Parity::Odd => odd.push((meta.block, t.coeff)),
                Parity::Even => even.push((meta.block, t.coeff)),
            }
        }
        (odd, even)
    }
}

impl fmt::Display for SumPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let sign = if t.coeff < 0 {
                "-"
            } else if i > 0 {
                "+"
            } else {
                ""
            };
            write!(f, "{sign}{}*d{}", t.coeff.unsigned_abs(), t.index)?;
        }
        Ok(())
    }
}

/// Parses forms such as `d5-d7`, `2*d3-1*d4` or `+1*d80`.
impl FromStr for SumPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s == "0" || s.is_empty() {
            return Ok(Self::empty());
        }
        let bad = || Error::Parse(format!("cannot parse pattern '{s}'"));
        let mut terms = Vec::new();
        let mut rest = s.as_str();
        while !rest.is_empty() {
            let (sign, body) = match rest.as_bytes()[0] {
                b'+' => (1i64, &rest[1..]),
                b'-' => (-1i64, &rest[1..]),
                _ => (1i64, rest),
            };
            let end = body[1..].find(['+', '-']).map(|i| i + 1).unwrap_or(body.len());
            let (term, tail) = body.split_at(end);
            let (coeff, idx) = match term.split_once('*') {
                Some((c, d)) => (c.parse::<i64>().map_err(|_| bad())?, d),
                None => (1, term),
            };
            let idx = idx
                .strip_prefix('d')
                .ok_or_else(bad)?
                .parse::<u64>()
                .map_err(|_| bad())?;
            terms.push((idx, sign * coeff));
            rest = tail;
        }
        Self::new(terms)
    }
}

/// All patterns with distinct indices in `[m, h]`, non-zero coefficients
/// and weight at most `k + 1`, in depth-first canonical order: by leading
/// index, then by coefficient, then recursively by the remaining terms.
pub fn enumerate_patterns(k: u32, m: u64, h: u64) -> PatternIter {
    PatternIter::new(k, m, h)
}

/// Depth-first iterator behind [`enumerate_patterns`].
#[derive(Debug, Clone)]
pub struct PatternIter {
    cap: i64,
    lo: u64,
    hi: u64,
    stack: Vec<PatternTerm>,
    started: bool,
    done: bool,
}

impl PatternIter {
    fn new(k: u32, m: u64, h: u64) -> Self {
        Self {
            cap: i64::from(k) + 1,
            lo: m.max(1),
            hi: h,
            stack: Vec::new(),
            started: false,
            done: m.max(1) > h,
        }
    }

    /// Restricts the iterator to patterns whose first index is `lead`.
    pub fn with_lead(k: u32, lead: u64, h: u64) -> LeadIter {
        LeadIter {
            inner: PatternIter::new(k, lead, h),
            lead,
        }
    }

    fn used(&self) -> i64 {
        self.stack.iter().map(|t| t.coeff.abs()).sum()
    }
}

impl Iterator for PatternIter {
    type Item = SumPattern;

    fn next(&mut self) -> Option<SumPattern> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.stack.push(PatternTerm {
                index: self.lo,
                coeff: -self.cap,
            });
            return Some(SumPattern {
                terms: self.stack.clone(),
            });
        }
        let used = self.used();
        let last = self.stack.last().expect("non-empty while running").index;
        if used < self.cap && last < self.hi {
            self.stack.push(PatternTerm {
                index: last + 1,
                coeff: -(self.cap - used),
            });
            return Some(SumPattern {
                terms: self.stack.clone(),
            });
        }
        while let Some(top) = self.stack.pop() {
            let room = self.cap - self.used();
            let mut next = top.coeff + 1;
            if next == 0 {
                next = 1;
            }
            if next <= room {
                self.stack.push(PatternTerm {
                    index: top.index,
                    coeff: next,
                });
                return Some(SumPattern {
                    terms: self.stack.clone(),
                });
            }
            if top.index < self.hi {
                self.stack.push(PatternTerm {
                    index: top.index + 1,
                    coeff: -room,
                });
                return Some(SumPattern {
                    terms: self.stack.clone(),
                });
            }
        }
        self.done = true;
        None
    }
}

/// Patterns of [`PatternIter`] that start at a fixed index.
#[derive(Debug, Clone)]
pub struct LeadIter {
    inner: PatternIter,
    lead: u64,
}

impl Iterator for LeadIter {
    type Item = SumPattern;

    fn next(&mut self) -> Option<SumPattern> {
        let p = self.inner.next()?;
        if p.min_index() == Some(self.lead) {
            Some(p)
        } else {
            self.inner.done = true;
            None
        }
    }
}

/// Exact value of the pattern in the sequence's ambient group.
pub fn pattern_value(seq: &Sequence, pattern: &SumPattern) -> Result<GroupElement> {
    let mut acc = seq.zero();
    for t in pattern.terms() {
        let term = seq.term(t.index)?;
        acc = acc.try_add(&term.scale(&BigInt::from(t.coeff)))?;
    }
    Ok(acc)
}
