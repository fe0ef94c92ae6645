use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::chains::ChainReport;
use super::pattern::SumPattern;
use crate::error::{Error, Result};
use crate::exactnum::{pow_u64, valuation, GroupElement, PruferValue};
use crate::sequences::{Sequence, SequenceSpec};

/// `m = 10t` with the family's `t`:
///
/// * split-sum, `g = ae + b`: `t = |b| + p(k+1)`;
/// * prufer-sum, `g = b/p^z`: `t = p(k+1) + max(z, c)`;
/// * integer-gamma, `g = b`: `t = |b| + (k+1)(q+γ)`.
pub fn witness_m(spec: &SequenceSpec, g: &GroupElement, k: u32) -> Result<u64> {
    if g.is_zero() {
        return Err(Error::ZeroTarget);
    }
    let k1 = BigInt::from(k) + 1;
    let t: BigInt = match (*spec, g) {
        (SequenceSpec::SplitSum { p, .. }, GroupElement::Split { p: gp, free, .. }) if p == *gp => free.abs() + &k1 * p,
        (SequenceSpec::IntegerGamma { q, gamma }, GroupElement::Int(b)) => b.abs() + &k1 * (q + gamma),
        (SequenceSpec::PruferSum { p, c }, GroupElement::Prufer(v)) if v.p() == p => {
            &k1 * p + prufer_q(c, v.exponent())
        }
        _ => {
            return Err(Error::MismatchedAmbient(format!(
                "target {g} is not an element of the group of {spec}"
            )))
        }
    };
    let m = t * 10u32;
    u64::try_from(m).map_err(|_| Error::InvalidParameter("witness m overflows u64".into()))
}

/// Least `q >= z` with `1/p^q` generating a subgroup that holds `u = 1/p^c`
/// and `g = b/p^z`.
pub fn prufer_q(c: u64, z: u64) -> u64 {
    c.max(z)
}

/// Distance from a pattern value to the target.
///
/// For ℤ and ℤ(p)⊕ℤ it is `|free(σ) - b|`. For ℤ(p^∞) it is the exponent
/// `α` of the reduced denominator `p^α` of `σ - g`, so `0` means equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum GapValue {
    Absolute(#[serde(serialize_with = "crate::report::ser_big")] BigInt),
    DenominatorExponent(u64),
}

impl GapValue {
    pub fn is_zero(&self) -> bool {
        match self {
            GapValue::Absolute(x) => x.is_zero(),
            GapValue::DenominatorExponent(e) => *e == 0,
        }
    }

    pub fn text(&self) -> String {
        match self {
            GapValue::Absolute(x) => crate::report::big_text(x),
            GapValue::DenominatorExponent(e) => format!("p^{e}"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GapRow {
    pub max_index: u64,
    pub min_gap: GapValue,
    pub patterns: u64,
}

/// Whether minimal gaps grow with the largest index, checked separately
/// for odd and even largest index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GapTrend {
    pub odd_led_nondecreasing: bool,
    pub even_led_nondecreasing: bool,
}

impl GapTrend {
    pub fn holds(&self) -> bool {
        self.odd_led_nondecreasing && self.even_led_nondecreasing
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NonMembershipReport {
    pub spec: SequenceSpec,
    pub target: GroupElement,
    pub k: u32,
    pub m: u64,
    pub horizon: u64,
    pub patterns_checked: u64,
    pub exhaustive_clear: bool,
    pub counterexample: Option<SumPattern>,
    pub min_gap_by_max_index: Vec<GapRow>,
    pub gap_trend: GapTrend,
    pub chain_samples: Vec<ChainReport>,
}

impl NonMembershipReport {
    fn trend(rows: &[GapRow]) -> GapTrend {
        let mono = |odd: bool| {
            let gaps: Vec<&GapValue> = rows
                .iter()
                .filter(|r| (r.max_index % 2 == 1) == odd)
                .map(|r| &r.min_gap)
                .collect();
            gaps.windows(2).all(|w| w[0] <= w[1])
        };
        GapTrend {
            odd_led_nondecreasing: mono(true),
            even_led_nondecreasing: mono(false),
        }
    }
}

/// Terms rewritten as integers so that a pattern value is a plain sum.
///
/// ℤ and ℤ(p)⊕ℤ terms keep their free part, with the torsion tracked
/// separately. Prüfer terms `a/p^e` become `a·p^(E-e)` over a common
/// `p^E`, so equality is a divisibility test and no gcd is ever taken.
struct LinearModel {
    torsion_mod: u64,
    torsion: Vec<u64>,
    value: Vec<BigInt>,
    target_torsion: u64,
    target: BigInt,
    /// `Some((p, E))` for Prüfer sequences.
    prufer: Option<(u64, u64)>,
    /// Reduced exponents and numerators mod `p^LOW_DIGITS` of the Prüfer
    /// terms, then of the target.
    low: Vec<(u64, BigInt)>,
    target_low: (u64, BigInt),
    lo: u64,
}

/// Base-p digits kept per Prüfer term for the fast gap computation.
const LOW_DIGITS: u64 = 64;

impl LinearModel {
    fn build(seq: &Sequence, g: &GroupElement, m: u64, h: u64) -> Result<Self> {
        let terms: Vec<GroupElement> = (m..=h)
            .map(|n| seq.term(n).map(|t| (*t).clone()))
            .collect::<Result<_>>()?;
        let mismatch =
            || Error::MismatchedAmbient(format!("target {g} is not an element of the group of {}", seq.spec()));
        match g {
            GroupElement::Int(b) => {
                let value = terms
                    .into_iter()
                    .map(|t| match t {
                        GroupElement::Int(x) => Ok(x),
                        _ => Err(mismatch()),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Self {
                    torsion_mod: 1,
                    torsion: vec![0; value.len()],
                    value,
                    target_torsion: 0,
                    target: b.clone(),
                    prufer: None,
                    low: Vec::new(),
                    target_low: (0, BigInt::zero()),
                    lo: m,
                })
            }
            GroupElement::Split { p, torsion, free } => {
                let mut ts = Vec::new();
                let mut vs = Vec::new();
                for t in terms {
                    match t {
                        GroupElement::Split {
                            p: q,
                            torsion: a,
                            free: x,
                        } if q == *p => {
                            ts.push(a);
                            vs.push(x);
                        }
                        _ => return Err(mismatch()),
                    }
                }
                Ok(Self {
                    torsion_mod: *p,
                    torsion: ts,
                    value: vs,
                    target_torsion: *torsion,
                    target: free.clone(),
                    prufer: None,
                    low: Vec::new(),
                    target_low: (0, BigInt::zero()),
                    lo: m,
                })
            }
            GroupElement::Prufer(gv) => {
                let p = gv.p();
                let mut parts = Vec::new();
                for t in terms {
                    match t {
                        GroupElement::Prufer(v) if v.p() == p => parts.push(v),
                        _ => return Err(mismatch()),
                    }
                }
                let e = parts
                    .iter()
                    .map(|v| v.exponent())
                    .chain(std::iter::once(gv.exponent()))
                    .max()
                    .unwrap_or(0);
                let align = |num: &BigInt, exp: u64| num * pow_u64(p, e - exp);
                let modulus = pow_u64(p, LOW_DIGITS);
                let low_of = |v: &PruferValue| (v.exponent(), v.numer().mod_floor(&modulus));
                Ok(Self {
                    low: parts.iter().map(low_of).collect(),
                    target_low: low_of(gv),
                    torsion_mod: 1,
                    torsion: vec![0; parts.len()],
                    value: parts.iter().map(|v| align(v.numer(), v.exponent())).collect(),
                    target_torsion: 0,
                    target: align(gv.numer(), gv.exponent()),
                    prufer: Some((p, e)),
                    lo: m,
                })
            }
        }
    }

    fn gap(&self, acc: &BigInt, stack: &[(u64, i64)]) -> GapValue {
        let diff = acc - &self.target;
        match self.prufer {
            None => GapValue::Absolute(diff.abs()),
            Some((p, e)) => {
                if diff.is_zero() {
                    return GapValue::DenominatorExponent(0);
                }
                if let Some(alpha) = self.low_gap(p, stack) {
                    return GapValue::DenominatorExponent(alpha);
                }
                GapValue::DenominatorExponent(e.saturating_sub(valuation(&diff, p)))
            }
        }
    }

    /// Denominator exponent of a Prüfer pattern value from the low digits
    /// alone. With `e*` the largest exponent present, `(σ - g)·p^e*` is an
    /// integer whose residue mod `p^LOW_DIGITS` only involves terms with
    /// exponent above `e* - LOW_DIGITS`. `None` when that residue is zero.
    fn low_gap(&self, p: u64, stack: &[(u64, i64)]) -> Option<u64> {
        let entries = stack
            .iter()
            .map(|&(n, l)| (&self.low[(n - self.lo) as usize], l))
            .chain(std::iter::once((&self.target_low, -1)));
        let top = entries.clone().map(|((exp, _), _)| *exp).max()?;
        let modulus = pow_u64(p, LOW_DIGITS);
        let mut residue = BigInt::zero();
        for ((exp, num), l) in entries {
            let shift = top - exp;
            if shift < LOW_DIGITS {
                residue += num * l * pow_u64(p, shift);
            }
        }
        let residue = residue.mod_floor(&modulus);
        if residue.is_zero() {
            return None;
        }
        // top below LOW_DIGITS with an integral difference reaches top
        Some(top.saturating_sub(valuation(&residue, p)))
    }

    fn equals_target(&self, torsion: u64, gap: &GapValue) -> bool {
        torsion == self.target_torsion && gap.is_zero()
    }
}

#[derive(Default)]
struct Partial {
    count: u64,
    first_hit: Option<SumPattern>,
    rows: BTreeMap<u64, (GapValue, u64)>,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        self.count += other.count;
        if self.first_hit.is_none() {
            self.first_hit = other.first_hit;
        }
        for (idx, (gap, n)) in other.rows {
            match self.rows.get_mut(&idx) {
                Some(slot) => {
                    if gap < slot.0 {
                        slot.0 = gap;
                    }
                    slot.1 += n;
                }
                None => {
                    self.rows.insert(idx, (gap, n));
                }
            }
        }
        self
    }
}

fn search_lead(model: &LinearModel, k: u32, lead: u64, h: u64) -> Partial {
    let mut out = Partial::default();
    let cap = i64::from(k) + 1;
    let mut stack: Vec<(u64, i64)> = Vec::new();
    walk(model, cap, lead, lead, h, &BigInt::zero(), 0, &mut stack, &mut out);
    out
}

/// Depth-first walk in the same order as [`super::PatternIter`], carrying the
/// running sum so each pattern costs one big addition.
#[allow(clippy::too_many_arguments)]
fn walk(
    model: &LinearModel,
    room: i64,
    from: u64,
    to_first: u64,
    h: u64,
    acc: &BigInt,
    torsion: u64,
    stack: &mut Vec<(u64, i64)>,
    out: &mut Partial,
) {
    let last = if stack.is_empty() { to_first } else { h };
    for n in from..=last {
        let slot = (n - model.lo) as usize;
        for l in (-room..=room).filter(|l| *l != 0) {
            let value = acc + &model.value[slot] * l;
            let t = (torsion as i128 + l as i128 * model.torsion[slot] as i128).rem_euclid(model.torsion_mod as i128)
                as u64;
            stack.push((n, l));
            let gap = model.gap(&value, stack);
            out.count += 1;
            if out.first_hit.is_none() && model.equals_target(t, &gap) {
                out.first_hit = Some(SumPattern::new(stack.clone()).expect("valid by construction"));
            }
            let row = out.rows.entry(n).or_insert_with(|| (gap.clone(), 0));
            if gap < row.0 {
                row.0 = gap;
            }
            row.1 += 1;
            let left = room - l.abs();
            if left > 0 && n < h {
                walk(model, left, n + 1, to_first, h, &value, t, stack, out);
            }
            stack.pop();
        }
    }
}

/// Exhaustive search of `A(k, m)` truncated at index `h` for the target.
///
/// Work is split by leading index and run in parallel; the merge keeps the
/// first counterexample in canonical order, so output never depends on
/// scheduling.
pub fn check_not_in_a(seq: &Sequence, g: &GroupElement, k: u32, m: u64, h: u64) -> Result<NonMembershipReport> {
    if m == 0 || m > h {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= m <= horizon, got m = {m}, horizon = {h}"
        )));
    }
    let model = LinearModel::build(seq, g, m, h)?;
    let partials: Vec<Partial> = (m..=h)
        .into_par_iter()
        .map(|lead| search_lead(&model, k, lead, h))
        .collect();
    let merged = partials.into_iter().fold(Partial::default(), Partial::merge);
    let rows: Vec<GapRow> = merged
        .rows
        .into_iter()
        .map(|(max_index, (min_gap, patterns))| GapRow {
            max_index,
            min_gap,
            patterns,
        })
        .collect();
    Ok(NonMembershipReport {
        spec: *seq.spec(),
        target: g.clone(),
        k,
        m,
        horizon: h,
        patterns_checked: merged.count,
        exhaustive_clear: merged.first_hit.is_none(),
        counterexample: merged.first_hit,
        gap_trend: NonMembershipReport::trend(&rows),
        min_gap_by_max_index: rows,
        chain_samples: Vec::new(),
    })
}
