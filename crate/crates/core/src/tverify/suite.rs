use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::chains::{check_inequality_chain_with, CaseId, ChainInput, ChainReport, FaultInjection};
use super::nonmember::witness_m;
use super::pattern::SumPattern;
use crate::error::{Error, Result};
use crate::exactnum::GroupElement;
use crate::sequences::{Sequence, SequenceSpec, TermIndexMeta};

#[derive(Debug, Clone, Serialize)]
pub struct SkippedSample {
    pub case: CaseId,
    pub pattern: SumPattern,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainSuite {
    pub spec: SequenceSpec,
    pub target: GroupElement,
    pub k: u32,
    pub m: u64,
    pub seed: u64,
    pub reports: Vec<ChainReport>,
    pub skipped: Vec<SkippedSample>,
}

impl ChainSuite {
    pub fn all_hold(&self) -> bool {
        self.reports.iter().all(|r| r.holds)
    }

    pub fn count(&self, case: CaseId) -> usize {
        self.reports.iter().filter(|r| r.case == case).count()
    }
}

/// Random signed coefficients, all non-zero, with `Σ|l| <= cap`.
fn coeffs(rng: &mut ChaCha8Rng, n: usize, cap: i64) -> Vec<i64> {
    let mut mags = vec![1i64; n];
    let mut spare = cap - n as i64;
    while spare > 0 && rng.gen_bool(0.5) {
        let i = rng.gen_range(0..n);
        mags[i] += 1;
        spare -= 1;
    }
    mags.into_iter()
        .map(|x| if rng.gen_bool(0.5) { x } else { -x })
        .collect()
}

fn distinct_blocks(rng: &mut ChaCha8Rng, n: usize, lo: u64, hi: u64) -> Vec<u64> {
    let mut set = BTreeSet::new();
    if hi < lo {
        return Vec::new();
    }
    let n = n.min((hi - lo + 1) as usize);
    while set.len() < n {
        set.insert(rng.gen_range(lo..=hi));
    }
    set.into_iter().collect()
}

struct Sampler<'a> {
    spec: &'a SequenceSpec,
    k: u32,
    m: u64,
    rng: ChaCha8Rng,
}

impl Sampler<'_> {
    fn cap(&self) -> i64 {
        i64::from(self.k) + 1
    }

    fn even_lo(&self) -> u64 {
        self.m.div_ceil(2).max(1)
    }

    fn odd_lo(&self) -> u64 {
        self.m.div_ceil(2) + 1
    }

    fn base(&self) -> u64 {
        self.spec.base()
    }

    fn pattern(terms: Vec<(u64, i64)>) -> SumPattern {
        let mut terms = terms;
        terms.sort();
        SumPattern::new(terms).expect("sampler builds valid patterns")
    }

    fn odd_terms(&mut self, n: usize, weight: i64) -> Vec<(u64, i64)> {
        let lo = self.odd_lo();
        let r_s = self.rng.gen_range(lo..=lo + 8);
        let mut blocks = distinct_blocks(&mut self.rng, n.saturating_sub(1), lo, r_s - 1);
        blocks.push(r_s);
        let ls = coeffs(&mut self.rng, blocks.len(), weight);
        blocks
            .into_iter()
            .zip(ls)
            .map(|(r, l)| (TermIndexMeta::odd(r), l))
            .collect()
    }

    fn weighted_sum(&mut self) -> SumPattern {
        let cap = self.cap();
        let v = self.rng.gen_range(1..=cap.min(4)) as usize;
        let blocks = distinct_blocks(&mut self.rng, v, 1, 40);
        let mut ls = coeffs(&mut self.rng, blocks.len(), cap);
        if ls.len() == 1 && ls[0].abs() == cap {
            ls[0] -= ls[0].signum();
        }
        Self::pattern(blocks.into_iter().map(TermIndexMeta::odd).zip(ls).collect())
    }

    fn even_only(&mut self) -> SumPattern {
        let cap = self.cap();
        let n = self.rng.gen_range(1..=cap.min(4)) as usize;
        let lo = self.even_lo();
        let blocks = distinct_blocks(&mut self.rng, n, lo, lo + 60);
        let ls = coeffs(&mut self.rng, blocks.len(), cap);
        Self::pattern(blocks.into_iter().map(TermIndexMeta::even).zip(ls).collect())
    }

    fn odd_only(&mut self) -> SumPattern {
        let cap = self.cap();
        let n = self.rng.gen_range(1..=cap.min(4)) as usize;
        let terms = self.odd_terms(n, cap);
        Self::pattern(terms)
    }

    fn geometric(&mut self) -> SumPattern {
        let lo = self.odd_lo();
        let r = self.rng.gen_range(lo..=lo + 40);
        Self::pattern(vec![(TermIndexMeta::odd(r), 1)])
    }

    /// Mixed shape. Even blocks are drawn near the gap window around
    /// `r_s³ - j·r_s`, below it, and above `r_s³`, so every branch of the
    /// argument is exercised.
    fn mixed(&mut self, allow_cancel: bool) -> SumPattern {
        let cap = self.cap();
        let base = self.base() as i64;
        let prufer = matches!(self.spec, SequenceSpec::PruferSum { .. });
        if allow_cancel && !prufer && cap >= base + 3 && self.rng.gen_bool(0.25) {
            return self.cancelling();
        }
        let s = self.rng.gen_range(1..=(cap - 1).min(3)) as usize;
        let even_n = self.rng.gen_range(1..=(cap - s as i64).min(3)) as usize;
        let odd_weight = self.rng.gen_range(s as i64..=cap - even_n as i64);
        let odd = self.odd_terms(s, odd_weight);
        let used: i64 = odd.iter().map(|x| x.1.abs()).sum();
        let r_s = TermIndexMeta::of(odd.last().unwrap().0).unwrap().block;
        let cube = r_s.pow(3);
        let lo = self.even_lo();
        let mut blocks = BTreeSet::new();
        while blocks.len() < even_n {
            let roll = self.rng.gen_range(0..6);
            let b = match roll {
                0 | 1 => self.rng.gen_range(lo..=lo + 40),
                2..=4 => {
                    let j = self.rng.gen_range(0..=r_s);
                    let d = self.rng.gen_range(-2i64..=2);
                    (cube - j * r_s).saturating_add_signed(d)
                }
                _ => cube + self.rng.gen_range(1..=50),
            };
            if b >= lo {
                blocks.insert(b);
            }
        }
        let ls = coeffs(&mut self.rng, even_n, cap - used);
        let mut terms = odd;
        terms.extend(blocks.into_iter().map(TermIndexMeta::even).zip(ls));
        Self::pattern(terms)
    }

    /// `l_s = ±base` with even terms chosen so the high part vanishes.
    fn cancelling(&mut self) -> SumPattern {
        let lo = self.odd_lo();
        let r_s = self.rng.gen_range(lo..=lo + 8);
        let base = self.base() as i64;
        let sign = if self.rng.gen_bool(0.5) { 1 } else { -1 };
        let cube = r_s.pow(3);
        let mut terms = vec![(TermIndexMeta::odd(r_s), sign * base)];
        for j in 0..3 {
            terms.push((TermIndexMeta::even(cube - j * r_s + 1), -sign));
        }
        let spare = self.cap() - base - 3;
        if spare > 0 && r_s > lo && self.rng.gen_bool(0.5) {
            let r = self.rng.gen_range(lo..r_s);
            terms.push((TermIndexMeta::odd(r), if self.rng.gen_bool(0.5) { 1 } else { -1 }));
        }
        Self::pattern(terms)
    }

    fn draw(&mut self, case: CaseId) -> SumPattern {
        match case {
            CaseId::WeightedSum => self.weighted_sum(),
            CaseId::EvenOnly => self.even_only(),
            CaseId::OddOnly => self.odd_only(),
            CaseId::Mixed | CaseId::HighBlock => self.mixed(true),
            CaseId::LowBlock => self.mixed(false),
            CaseId::GeometricTail => self.geometric(),
        }
    }
}

/// Seeded audit: draws `samples` patterns round-robin over the cases that
/// apply to the family, all at or beyond the witness `m`, and evaluates
/// each chain. Samples that hit the exponent guard are recorded as skipped.
pub fn sample_chain_suite(seq: &Sequence, g: &GroupElement, k: u32, samples: usize, seed: u64) -> Result<ChainSuite> {
    sample_chain_suite_with(seq, g, k, samples, seed, FaultInjection::default())
}

/// Same as [`sample_chain_suite`], with `fault` applied to the first sample.
pub fn sample_chain_suite_with(
    seq: &Sequence,
    g: &GroupElement,
    k: u32,
    samples: usize,
    seed: u64,
    fault: FaultInjection,
) -> Result<ChainSuite> {
    let spec = *seq.spec();
    let m = witness_m(&spec, g, k)?;
    let mut cases: Vec<CaseId> = CaseId::ALL.into_iter().filter(|c| c.applies(&spec, k)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    cases.shuffle(&mut rng);
    let mut sampler = Sampler { spec: &spec, k, m, rng };
    // draw sequentially so the patterns depend only on the seed, then
    // evaluate in parallel and keep the draw order
    let drawn: Vec<(CaseId, SumPattern)> = (0..samples)
        .map(|i| {
            let case = cases[i % cases.len()];
            (case, sampler.draw(case))
        })
        .collect();
    let results: Vec<Result<ChainReport>> = drawn
        .par_iter()
        .enumerate()
        .map(|(i, (case, pattern))| {
            let input = ChainInput {
                pattern: pattern.clone(),
                k,
                m,
                target: Some(g.clone()),
            };
            let fault = if i == 0 { fault } else { FaultInjection::default() };
            check_inequality_chain_with(seq, *case, &input, fault)
        })
        .collect();
    let mut reports = Vec::with_capacity(samples);
    let mut skipped = Vec::new();
    for ((case, pattern), result) in drawn.into_iter().zip(results) {
        match result {
            Ok(r) => reports.push(r),
            Err(e @ Error::ExponentTooLarge { .. }) => skipped.push(SkippedSample {
                case,
                pattern,
                reason: e.to_string(),
            }),
            Err(e) => {
                return Err(Error::PreconditionViolated(format!(
                    "sampled {case} pattern {pattern} was rejected: {e}"
                )))
            }
        }
    }
    Ok(ChainSuite {
        spec,
        target: g.clone(),
        k,
        m,
        seed,
        reports,
        skipped,
    })
}
