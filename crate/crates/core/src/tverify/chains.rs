use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::exact::{Exact, InequalityLine, Lines, PFrac, Relation};
use super::gap::select_i0;
use super::nonmember::{prufer_q, witness_m};
use super::pattern::{pattern_value, BlockTerms, SumPattern};
use crate::error::{Error, Result};
use crate::exactnum::{pow_u64, GroupElement};
use crate::sequences::{f_term, Sequence, SequenceSpec};

use Relation::{Eq as EQ, Ge, Gt, Le, Lt, Ne};

/// The displayed estimates of the non-membership argument.
///
/// | id | shape | families |
/// |---|---|---|
/// | `weighted-sum` | odd terms, any blocks | ℤ-type |
/// | `even-only` | even terms from `m` on | all |
/// | `odd-only` | odd terms beyond `m` | all |
/// | `mixed` | both parities, full argument | all |
/// | `low-block` | mixed, bound on the low part `A2` | ℤ-type |
/// | `high-block` | mixed, factorization of the high part `A4` | ℤ-type |
/// | `geometric-tail` | largest odd block `r_s` | Prüfer |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseId {
    WeightedSum,
    EvenOnly,
    OddOnly,
    Mixed,
    LowBlock,
    HighBlock,
    GeometricTail,
}

impl CaseId {
    pub const ALL: [CaseId; 7] = [
        CaseId::WeightedSum,
        CaseId::EvenOnly,
        CaseId::OddOnly,
        CaseId::Mixed,
        CaseId::LowBlock,
        CaseId::HighBlock,
        CaseId::GeometricTail,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CaseId::WeightedSum => "weighted-sum",
            CaseId::EvenOnly => "even-only",
            CaseId::OddOnly => "odd-only",
            CaseId::Mixed => "mixed",
            CaseId::LowBlock => "low-block",
            CaseId::HighBlock => "high-block",
            CaseId::GeometricTail => "geometric-tail",
        }
    }

    /// Whether the case exists for this family at weight bound `k`.
    pub fn applies(self, spec: &SequenceSpec, k: u32) -> bool {
        let prufer = matches!(spec, SequenceSpec::PruferSum { .. });
        match self {
            CaseId::WeightedSum => !prufer && k >= 1,
            CaseId::EvenOnly | CaseId::OddOnly => true,
            CaseId::Mixed => k >= 1,
            CaseId::LowBlock | CaseId::HighBlock => !prufer && k >= 1,
            CaseId::GeometricTail => prufer,
        }
    }

    fn needs_target(self) -> bool {
        !matches!(self, CaseId::WeightedSum | CaseId::GeometricTail)
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CaseId::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown case id '{s}'")))
    }
}

#[derive(Debug, Clone)]
pub struct ChainInput {
    pub pattern: SumPattern,
    pub k: u32,
    pub m: u64,
    pub target: Option<GroupElement>,
}

/// Derived data the chain depends on.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ChainContext {
    pub r_s: Option<u64>,
    pub i0: Option<u64>,
    /// Later even blocks below the gap (`B`, or `K` for Prüfer).
    pub low_blocks: Vec<u64>,
    /// Later even blocks above the gap (`D`, or `L` for Prüfer).
    pub high_blocks: Vec<u64>,
    /// Whether the high part `A4` vanishes.
    pub high_part_zero: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    pub case: CaseId,
    pub spec: SequenceSpec,
    pub pattern: SumPattern,
    pub k: u32,
    pub m: u64,
    pub target: Option<GroupElement>,
    pub context: ChainContext,
    pub lines: Vec<InequalityLine>,
    pub holds: bool,
}

/// Optional corruption of one evaluation, used to test exit-code paths.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FaultInjection {
    pub flip_line: Option<usize>,
}

fn violated(msg: impl Into<String>) -> Error {
    Error::PreconditionViolated(msg.into())
}

/// Evaluates every link of the chain for the case on one pattern.
pub fn check_inequality_chain(seq: &Sequence, case: CaseId, input: &ChainInput) -> Result<ChainReport> {
    check_inequality_chain_with(seq, case, input, FaultInjection::default())
}

pub fn check_inequality_chain_with(
    seq: &Sequence,
    case: CaseId,
    input: &ChainInput,
    fault: FaultInjection,
) -> Result<ChainReport> {
    let spec = *seq.spec();
    if !case.applies(&spec, input.k) {
        return Err(violated(format!(
            "case {case} does not apply to {spec} with k = {}",
            input.k
        )));
    }
    let p = &input.pattern;
    if p.is_empty() {
        return Err(violated("empty pattern"));
    }
    if p.weight() > u64::from(input.k) + 1 {
        return Err(violated(format!("weight {} exceeds k+1 = {}", p.weight(), input.k + 1)));
    }
    if case.needs_target() {
        let g = input
            .target
            .as_ref()
            .ok_or_else(|| violated(format!("case {case} needs a target")))?;
        let w = witness_m(&spec, g, input.k)?;
        if input.m < w {
            return Err(violated(format!("m = {} is below the witness {w}", input.m)));
        }
    }
    let (odd, even) = p.split_parity();
    let shape_ok = match case {
        CaseId::WeightedSum => even.is_empty(),
        CaseId::EvenOnly => odd.is_empty(),
        CaseId::OddOnly => even.is_empty(),
        CaseId::Mixed | CaseId::LowBlock | CaseId::HighBlock => !odd.is_empty() && !even.is_empty(),
        CaseId::GeometricTail => !odd.is_empty(),
    };
    if !shape_ok {
        return Err(violated(format!("pattern {p} does not have the {case} shape")));
    }
    if case.needs_target() {
        if even.iter().any(|&(r, _)| 2 * r < input.m) {
            return Err(violated(format!("an even index of {p} is below m = {}", input.m)));
        }
        if odd.iter().any(|&(r, _)| 2 * r - 1 <= input.m) {
            return Err(violated(format!("an odd index of {p} is not above m = {}", input.m)));
        }
    }

    let mut ctx = ChainContext::default();
    let mut lines = Lines::default();
    match spec {
        SequenceSpec::PruferSum { p: prime, c } => {
            let pc = PruferCtx {
                seq,
                input,
                p: prime,
                c,
                odd: &odd,
                even: &even,
            };
            match case {
                CaseId::EvenOnly => pc.even_only(&mut lines)?,
                CaseId::OddOnly => pc.odd_only(&mut lines, &mut ctx)?,
                CaseId::Mixed => pc.mixed(&mut lines, &mut ctx)?,
                CaseId::GeometricTail => pc.geometric(&mut lines, &mut ctx)?,
                _ => unreachable!("filtered by applies()"),
            }
        }
        _ => {
            let zc = ZCtx::new(seq, input, &odd, &even)?;
            match case {
                CaseId::WeightedSum => zc.weighted_sum(&mut lines)?,
                CaseId::EvenOnly => zc.even_only(&mut lines)?,
                CaseId::OddOnly => zc.odd_only(&mut lines, &mut ctx)?,
                CaseId::Mixed | CaseId::LowBlock | CaseId::HighBlock => zc.mixed(case, &mut lines, &mut ctx)?,
                CaseId::GeometricTail => unreachable!("filtered by applies()"),
            }
        }
    }
    let mut lines = lines.0;
    if let Some(i) = fault.flip_line {
        if let Some(line) = lines.get_mut(i) {
            line.holds = !line.holds;
        }
    }
    let holds = lines.iter().all(|l| l.holds);
    Ok(ChainReport {
        case,
        spec,
        pattern: input.pattern.clone(),
        k: input.k,
        m: input.m,
        target: input.target.clone(),
        context: ctx,
        lines,
        holds,
    })
}

fn free_part(x: &GroupElement) -> BigInt {
    match x {
        GroupElement::Int(n) => n.clone(),
        GroupElement::Split { free, .. } => free.clone(),
        GroupElement::Prufer(_) => unreachable!("ℤ-type families only"),
    }
}

fn final_line(lines: &mut Lines, sigma: &GroupElement, g: &GroupElement) {
    lines.fact("sigma != g", sigma.summary(), Ne, g.summary(), sigma != g);
}

/// ℤ-type families: split-sum (torsion `e`) and integer-gamma (constant `γ`).
struct ZCtx<'a> {
    seq: &'a Sequence,
    input: &'a ChainInput,
    odd: &'a [(u64, i64)],
    even: &'a [(u64, i64)],
    base: u64,
    gamma: BigInt,
    k1: BigInt,
}

impl<'a> ZCtx<'a> {
    fn new(seq: &'a Sequence, input: &'a ChainInput, odd: &'a [(u64, i64)], even: &'a [(u64, i64)]) -> Result<Self> {
        let (base, gamma) = match *seq.spec() {
            SequenceSpec::SplitSum { p, .. } => (p, BigInt::zero()),
            SequenceSpec::IntegerGamma { q, gamma } => (q, BigInt::from(gamma)),
            SequenceSpec::PruferSum { .. } => unreachable!(),
        };
        Ok(Self {
            seq,
            input,
            odd,
            even,
            base,
            gamma,
            k1: BigInt::from(input.k) + 1,
        })
    }

    fn pw(&self, e: u64) -> Result<BigInt> {
        self.seq.guard().pow(self.base, e)
    }

    fn f(&self, r: u64) -> Result<BigInt> {
        f_term(self.base, r, self.seq.guard())
    }

    /// `p^(r³ - j·r)` for `j = 0..=r`, built upward from `p^(r³ - r²)` by
    /// repeated multiplication with the small factor `p^r`.
    fn ladder(&self, r: u64) -> Result<Vec<BigInt>> {
        let cube = r.pow(3);
        self.seq.guard().check(self.base, cube)?;
        let step = self.pw(r)?;
        let mut out = vec![BigInt::zero(); r as usize + 1];
        out[r as usize] = self.pw(cube - r * r)?;
        for j in (0..r as usize).rev() {
            out[j] = &out[j + 1] * &step;
        }
        Ok(out)
    }

    fn target(&self) -> &GroupElement {
        self.input.target.as_ref().expect("checked by caller")
    }

    fn b(&self) -> BigInt {
        free_part(self.target()).abs()
    }

    fn sigma(&self) -> Result<GroupElement> {
        pattern_value(self.seq, &self.input.pattern)
    }

    /// `|b| + (k+1)γ`: what the free part must exceed once the `γ` shift
    /// of the odd terms is accounted for.
    fn gamma_shift_lines(&self, lines: &mut Lines, label: &str, value: BigInt) {
        if !self.gamma.is_zero() {
            let bound = self.b() + &self.k1 * &self.gamma;
            lines.ints(&format!("{label} > |b| + (k+1)*gamma"), value, Gt, bound);
        }
    }

    fn weighted_sum(&self, lines: &mut Lines) -> Result<()> {
        if self.odd.len() == 1 && BigInt::from(self.odd[0].1.unsigned_abs()) == self.k1 {
            return Err(violated(
                "a single term with |l| = k+1 meets the weighted-sum bound with equality",
            ));
        }
        let (r_v, _) = *self.odd.last().unwrap();
        let mut sum = BigInt::zero();
        for &(r, l) in self.odd {
            sum += self.f(r)? * l;
        }
        let f_v = self.f(r_v)?;
        let top = self.pw(r_v.pow(3))?;
        lines.ints("f_{r_v} < 2 p^{r_v^3}", f_v.clone(), Lt, &top * 2u32);
        lines.ints("2 p^{r_v^3} <= p^{r_v^3+1}", &top * 2u32, Le, &top * self.base);
        lines.ints("|sum l_i f_{r_i}| < (k+1) f_{r_v}", sum.abs(), Lt, &self.k1 * &f_v);
        lines.ints(
            "(k+1) f_{r_v} <= (k+1) p^{r_v^3+1}",
            &self.k1 * &f_v,
            Le,
            &self.k1 * top * self.base,
        );
        Ok(())
    }

    fn even_only(&self, lines: &mut Lines) -> Result<()> {
        let sigma = self.sigma()?;
        let value = free_part(&sigma);
        let r1 = self.even[0].0;
        let p_r1 = self.pw(r1)?;
        let mut sigma1 = BigInt::zero();
        for &(r, l) in self.even {
            sigma1 += self.pw(r - r1)? * l;
        }
        let rem = &value - &sigma1 * &p_r1;
        lines.ints("sigma - p^{r_1} sigma' = 0", rem, EQ, 0);
        if sigma1.is_zero() {
            lines.fact(
                "sigma' = 0, so sigma = 0 != g",
                sigma.summary(),
                Ne,
                self.target().summary(),
                !self.target().is_zero(),
            );
        } else {
            let b = self.b();
            let b5 = u64::try_from(&b * 5u32).map_err(|_| Error::InvalidParameter("target too large".into()))?;
            lines.ints("|sigma| >= p^{r_1}", value.abs(), Ge, p_r1.clone());
            lines.ints("p^{r_1} >= p^{5|b|}", p_r1, Ge, self.pw(b5)?);
            lines.ints("p^{5|b|} > |b|", self.pw(b5)?, Gt, b);
        }
        final_line(lines, &sigma, self.target());
        Ok(())
    }

    fn prev_bound(&self, r_prev: u64) -> Result<BigInt> {
        Ok(&self.k1 * self.pw(r_prev.pow(3) + 1)?)
    }

    fn odd_only(&self, lines: &mut Lines, ctx: &mut ChainContext) -> Result<()> {
        let sigma = self.sigma()?;
        let (r_s, _) = *self.odd.last().unwrap();
        ctx.r_s = Some(r_s);
        let r_prev = prev_block(self.odd);
        let sum_l: i64 = self.odd.iter().map(|x| x.1).sum();
        let mut fsum = BigInt::zero();
        for &(r, l) in self.odd {
            fsum += self.f(r)? * l;
        }
        let shifted = free_part(&sigma) - &self.gamma * sum_l;
        lines.ints(
            "|free(sigma) - (sum l_i) gamma| = |sum l_i f_{r_i}|",
            shifted.abs(),
            EQ,
            fsum.abs(),
        );
        lines.ints("r_s > 5p(k+1)", r_s, Gt, &self.k1 * 5u32 * self.base);
        if self.odd.len() >= 2 {
            lines.ints("r_{s-1}^3 < r_s^3 - r_s^2", r_prev.pow(3), Lt, r_s.pow(3) - r_s * r_s);
        }
        let x = self.prev_bound(r_prev)?;
        let f_s = self.f(r_s)?;
        let diff = &f_s - &x;
        lines.ints(
            "|sum l_i f_{r_i}| > f_{r_s} - (k+1) p^{r_{s-1}^3+1}",
            fsum.abs(),
            Gt,
            diff.clone(),
        );
        let ladder = self.ladder(r_s)?;
        let mut regroup = BigInt::zero();
        for pj in &ladder[..=r_s as usize - 2] {
            regroup += pj;
        }
        regroup += &ladder[r_s as usize - 1] + &ladder[r_s as usize] - &x;
        lines.ints(
            "f_{r_s} - (k+1) p^{r_{s-1}^3+1} regrouped by powers",
            diff.clone(),
            EQ,
            regroup,
        );
        lines.ints("(k+1) p < p^{r_s-1}", &self.k1 * self.base, Lt, self.pw(r_s - 1)?);
        let top = ladder[0].clone();
        lines.ints("f_{r_s} - (k+1) p^{r_{s-1}^3+1} > p^{r_s^3}", diff, Gt, top.clone());
        lines.ints("p^{r_s^3} > |b|", top.clone(), Gt, self.b());
        self.gamma_shift_lines(lines, "p^{r_s^3}", top);
        final_line(lines, &sigma, self.target());
        Ok(())
    }

    fn mixed(&self, case: CaseId, lines: &mut Lines, ctx: &mut ChainContext) -> Result<()> {
        let sigma = self.sigma()?;
        let (r, l_s) = *self.odd.last().unwrap();
        let r_prev = prev_block(self.odd);
        let later: Vec<u64> = self.even.iter().map(|x| x.0).collect();
        let i0 = select_i0(r, &later, self.input.k)?;
        let cube = r.pow(3);
        let low_cut = cube - (i0 + 2) * r;
        let high_cut = cube - (i0 - 1) * r;
        let (low, high): (BlockTerms, BlockTerms) = self.even.iter().partition(|x| x.0 < low_cut);
        ctx.r_s = Some(r);
        ctx.i0 = Some(i0);
        ctx.low_blocks = low.iter().map(|x| x.0).collect();
        ctx.high_blocks = high.iter().map(|x| x.0).collect();

        let mut rest = BigInt::zero();
        for &(rb, l) in &self.odd[..self.odd.len() - 1] {
            rest += self.f(rb)? * l;
        }
        let ladder = self.ladder(r)?;
        let at = |j: u64| &ladder[j as usize];
        let mut a2 = BigInt::zero();
        for &(rb, l) in &low {
            a2 += self.pw(rb)? * l;
        }
        for j in i0 + 2..=r {
            a2 += at(j) * l_s;
        }
        let p_a = at(i0).clone();
        let p_a1 = at(i0 + 1).clone();
        let p_low = at(i0 + 2).clone();
        let p_high = at(i0 - 1).clone();
        let row3 = (&p_a1 + &p_a) * l_s;
        // every exponent in A4 is at least high_cut, so the quotient is
        // assembled term by term and checked by multiplying back
        let mut a4 = BigInt::zero();
        let mut sigma2 = BigInt::zero();
        for j in 0..i0 {
            a4 += at(j) * l_s;
            sigma2 += self.pw((i0 - 1 - j) * r)? * l_s;
        }
        for &(rb, l) in &high {
            a4 += self.pw(rb)? * l;
            sigma2 += self.pw(rb - high_cut)? * l;
        }
        let rem = &a4 - &p_high * &sigma2;
        ctx.high_part_zero = Some(sigma2.is_zero());
        let ls = BigInt::from(l_s.unsigned_abs());
        let low_weight: u64 = low.iter().map(|x| x.1.unsigned_abs()).sum();

        let full = case == CaseId::Mixed;
        if full {
            let sum_l: i64 = self.odd.iter().map(|x| x.1).sum();
            let shifted = free_part(&sigma) - &self.gamma * sum_l;
            lines.ints(
                "free(sigma) - (sum l_i) gamma = rest + A2 + row3 + A4",
                shifted,
                EQ,
                &rest + &a2 + &row3 + &a4,
            );
        }
        if full || case == CaseId::LowBlock {
            let mid = (BigInt::from(low_weight) + &ls * 2u32) * &p_low;
            let three = &self.k1 * 3u32;
            lines.ints("|A2| < (sum_B |l|) p^{low} + 2|l_s| p^{low}", a2.abs(), Lt, mid.clone());
            lines.ints(
                "(sum_B |l| + 2|l_s|) p^{low} < 3(k+1) p^{low}",
                mid,
                Lt,
                &three * &p_low,
            );
            lines.ints(
                "3(k+1) p^{low} < p^{r_s^3-(i0+1)r_s}",
                &three * &p_low,
                Lt,
                p_a1.clone(),
            );
            lines.ints("3(k+1) < r_s", three, Lt, r);
            lines.ints("r_s < p^{r_s} - 1", r, Lt, self.pw(r)? - 1);
        }
        if full || case == CaseId::HighBlock {
            lines.ints("A4 mod p^{r_s^3-(i0-1)r_s} = 0", rem, EQ, 0);
            lines.ints("A4 = p^{r_s^3-(i0-1)r_s} sigma''", a4.clone(), EQ, &p_high * &sigma2);
        }
        if !full {
            return Ok(());
        }
        let x = self.prev_bound(r_prev)?;
        let b = self.b();
        let b_exp = u64::try_from(&b).map_err(|_| Error::InvalidParameter("target too large".into()))?;
        let p_sq = self.pw(r * r)?;
        let p_b = self.pw(b_exp)?;
        let y = (&rest + &a2 + &row3 + &a4).abs();
        let k2 = &self.k1 + 1u32;
        let three = &self.k1 * 3u32;
        let last = if !sigma2.is_zero() {
            let r1 = &p_high - &x - &self.k1 * 2u32 * &p_a;
            let r2 = &p_high - &three * &p_a;
            lines.ints(
                "|rest + A2 + row3 + A4| > p^{high} - (k+1) p^{r_{s-1}^3+1} - 2(k+1) p^{a}",
                y,
                Gt,
                r1.clone(),
            );
            lines.ints(
                "p^{high} - (k+1) p^{r_{s-1}^3+1} - 2(k+1) p^{a} > p^{high} - 3(k+1) p^{a}",
                r1,
                Gt,
                r2.clone(),
            );
            lines.ints("p^{high} - 3(k+1) p^{a} > p^{a}", r2, Gt, p_a.clone());
            lines.ints("p^{a} > p^{r_s^2}", p_a, Gt, p_sq.clone());
            p_sq
        } else {
            let r1 = &p_a - &x - &k2 * &p_a1;
            let r2 = &p_a - &three * &p_a1;
            lines.ints(
                "|rest + A2 + row3| > p^{a} - (k+1) p^{r_{s-1}^3+1} - (k+2) p^{a-r_s}",
                y,
                Gt,
                r1.clone(),
            );
            lines.ints(
                "p^{a} - (k+1) p^{r_{s-1}^3+1} - (k+2) p^{a-r_s} > p^{a} - 3(k+1) p^{a-r_s}",
                r1,
                Gt,
                r2.clone(),
            );
            lines.ints("p^{a} - 3(k+1) p^{a-r_s} > p^{a-r_s}", r2, Gt, p_a1.clone());
            lines.ints("p^{a-r_s} > p^{r_s^2}", p_a1, Gt, p_sq.clone());
            p_sq
        };
        lines.ints("p^{r_s^2} > p^{|b|}", last.clone(), Gt, p_b.clone());
        lines.ints("p^{|b|} > |b|", p_b, Gt, b);
        self.gamma_shift_lines(lines, "p^{r_s^2}", last);
        final_line(lines, &sigma, self.target());
        Ok(())
    }
}

/// Block of the second-largest odd term, or `0` when there is only one.
fn prev_block(odd: &[(u64, i64)]) -> u64 {
    if odd.len() >= 2 {
        odd[odd.len() - 2].0
    } else {
        0
    }
}

struct PruferCtx<'a> {
    seq: &'a Sequence,
    input: &'a ChainInput,
    p: u64,
    c: u64,
    odd: &'a [(u64, i64)],
    even: &'a [(u64, i64)],
}

impl PruferCtx<'_> {
    fn target(&self) -> &GroupElement {
        self.input.target.as_ref().expect("checked by caller")
    }

    fn q(&self) -> u64 {
        match self.target() {
            GroupElement::Prufer(v) => prufer_q(self.c, v.exponent()),
            _ => self.c,
        }
    }

    fn k1(&self) -> u64 {
        u64::from(self.input.k) + 1
    }

    fn guard_exp(&self, e: u64) -> Result<()> {
        self.seq.guard().check(self.p, e)
    }

    fn inv(&self, e: u64) -> PFrac {
        PFrac::new(self.p, 1, e)
    }

    /// `1/p^c + Σ_j 1/p^(r³ - j·r)` as a rational, not reduced mod 1.
    fn odd_term(&self, r: u64) -> Result<PFrac> {
        let cube = r.pow(3);
        self.guard_exp(cube.max(self.c))?;
        let mut acc = self.inv(self.c);
        for j in 0..=r {
            acc = acc.add(&self.inv(cube - j * r));
        }
        Ok(acc)
    }

    fn sigma_rational(&self) -> Result<PFrac> {
        let mut acc = PFrac::zero(self.p);
        for &(r, l) in self.odd {
            acc = acc.add(&self.odd_term(r)?.scale(l));
        }
        for &(r, l) in self.even {
            self.guard_exp(r)?;
            acc = acc.add(&self.inv(r).scale(l));
        }
        Ok(acc)
    }

    /// Pattern value from the memoized terms, as a reduced element mod 1.
    fn sigma(&self, lines: &mut Lines) -> Result<(GroupElement, u64)> {
        let sigma = pattern_value(self.seq, &self.input.pattern)?;
        let GroupElement::Prufer(v) = &sigma else {
            unreachable!("Prüfer sequence")
        };
        let rational = self.sigma_rational()?;
        let modulus = pow_u64(self.p, rational.exp);
        let reduced = Exact::frac(rational.num.mod_floor(&modulus), modulus);
        let from_terms = Exact::frac(v.numer().clone(), pow_u64(self.p, v.exponent()));
        lines.cmp("sigma mod 1 agrees with the sum of terms", reduced, EQ, from_terms);
        Ok((sigma.clone(), v.exponent()))
    }

    fn even_only(&self, lines: &mut Lines) -> Result<()> {
        let (sigma, _) = self.sigma(lines)?;
        let rational = self.sigma_rational()?;
        let mut s1 = PFrac::zero(self.p);
        for &(r, l) in self.even {
            s1 = s1.add(&self.inv(r).scale(l.abs()));
        }
        let r1 = self.even[0].0;
        let k1 = self.k1();
        let q = self.q();
        lines.cmp(
            "|sigma| <= sum |l_i|/p^{r_i}",
            Exact::pfrac(&rational.abs()),
            Le,
            Exact::pfrac(&s1),
        );
        let bound1 = PFrac::new(self.p, k1, r1);
        lines.cmp(
            "sum |l_i|/p^{r_i} <= (k+1)/p^{r_1}",
            Exact::pfrac(&s1),
            Le,
            Exact::pfrac(&bound1),
        );
        let bound2 = PFrac::new(self.p, k1, k1 + q);
        lines.cmp(
            "(k+1)/p^{r_1} < (k+1)/p^{k+1+q}",
            Exact::pfrac(&bound1),
            Lt,
            Exact::pfrac(&bound2),
        );
        lines.cmp(
            "(k+1)/p^{k+1+q} < 1/p^q",
            Exact::pfrac(&bound2),
            Lt,
            Exact::pfrac(&self.inv(q)),
        );
        final_line(lines, &sigma, self.target());
        Ok(())
    }

    fn odd_only(&self, lines: &mut Lines, ctx: &mut ChainContext) -> Result<()> {
        let (sigma, alpha) = self.sigma(lines)?;
        let (r, l_s) = *self.odd.last().unwrap();
        ctx.r_s = Some(r);
        let cube = r.pow(3);
        let rational = self.sigma_rational()?;
        let n = rational.aligned(cube.max(rational.exp));
        let (z1, rem) = (&n - l_s).div_rem(&pow_u64(self.p, r));
        lines.ints("(sigma p^{r_s^3} - l_s) mod p^{r_s} = 0", rem, EQ, 0);
        let split = PFrac::new(self.p, z1, cube - r).add(&PFrac::new(self.p, l_s, cube));
        lines.cmp(
            "sigma = z'/p^{r_s^3-r_s} + l_s/p^{r_s^3}",
            Exact::pfrac(&rational),
            EQ,
            Exact::pfrac(&split),
        );
        let k1 = self.k1();
        let q = self.q();
        lines.ints("r_s > 5p(k+1)", r, Gt, 5 * self.p * k1);
        lines.ints("|l_s| <= k+1", l_s.unsigned_abs(), Le, k1);
        lines.cmp("k+1 < r_s/p", Exact::int(k1), Lt, Exact::frac(r, self.p));
        lines.cmp(
            "r_s/p < p^{r_s-1}",
            Exact::frac(r, self.p),
            Lt,
            Exact::int(pow_u64(self.p, r - 1)),
        );
        lines.ints("alpha >= r_s^3 - r_s + 1", alpha, Ge, cube - r + 1);
        lines.ints("r_s^3 - r_s + 1 > 5q", cube - r + 1, Gt, 5 * q);
        final_line(lines, &sigma, self.target());
        Ok(())
    }

    fn geometric_lines(&self, lines: &mut Lines, r: u64) {
        let k = u64::from(self.input.k);
        let pr = pow_u64(self.p, r);
        lines.cmp(
            "1/(1 - 1/p^{r_s}) < 32/31",
            Exact::frac(pr.clone(), &pr - 1),
            Lt,
            Exact::frac(32, 31),
        );
        let p2k = pow_u64(self.p, 2 * k);
        lines.ints("2k < p^{2k}", 2 * k, Lt, p2k.clone());
        lines.ints("p^{2k} < p^{r_s}", p2k, Lt, pr);
    }

    fn geometric(&self, lines: &mut Lines, ctx: &mut ChainContext) -> Result<()> {
        let r = self.odd.last().unwrap().0;
        ctx.r_s = Some(r);
        let bound = 5 * self.p * self.k1();
        if r <= bound {
            return Err(violated(format!("r_s = {r} must exceed 5p(k+1) = {bound}")));
        }
        self.guard_exp(r)?;
        lines.ints("r_s > 5p(k+1)", r, Gt, bound);
        self.geometric_lines(lines, r);
        Ok(())
    }

    fn mixed(&self, lines: &mut Lines, ctx: &mut ChainContext) -> Result<()> {
        let (sigma, alpha) = self.sigma(lines)?;
        let (r, l_s) = *self.odd.last().unwrap();
        let later: Vec<u64> = self.even.iter().map(|x| x.0).collect();
        let i0 = select_i0(r, &later, self.input.k)?;
        let cube = r.pow(3);
        let low_cut = cube - (i0 + 2) * r;
        let high_cut = cube - (i0 - 1) * r;
        let (low, high): (BlockTerms, BlockTerms) = self.even.iter().partition(|x| x.0 < low_cut);
        ctx.r_s = Some(r);
        ctx.i0 = Some(i0);
        ctx.low_blocks = low.iter().map(|x| x.0).collect();
        ctx.high_blocks = high.iter().map(|x| x.0).collect();
        for &(rb, _) in self.even {
            self.guard_exp(rb)?;
        }

        let mut row1 = self.inv(self.c).scale(l_s);
        for &(rb, l) in &self.odd[..self.odd.len() - 1] {
            row1 = row1.add(&self.odd_term(rb)?.scale(l));
        }
        for &(rb, l) in &low {
            row1 = row1.add(&self.inv(rb).scale(l));
        }
        for j in i0 + 2..=r {
            row1 = row1.add(&self.inv(cube - j * r).scale(l_s));
        }
        let row2 = self.inv(cube - (i0 + 1) * r).add(&self.inv(cube - i0 * r)).scale(l_s);
        let mut row3 = PFrac::zero(self.p);
        for j in 0..i0 {
            row3 = row3.add(&self.inv(cube - j * r).scale(l_s));
        }
        for &(rb, l) in &high {
            row3 = row3.add(&self.inv(rb).scale(l));
        }
        let rational = self.sigma_rational()?;
        let total = row1.add(&row2).add(&row3);
        lines.cmp(
            "sigma = row1 + row2 + row3",
            Exact::pfrac(&rational),
            EQ,
            Exact::pfrac(&total),
        );
        let row1_rem = if row1.exp <= low_cut {
            BigInt::zero()
        } else {
            row1.num.mod_floor(&pow_u64(self.p, row1.exp - low_cut))
        };
        lines.ints("row1 p^{r_s^3-(i0+2)r_s} is an integer", row1_rem, EQ, 0);
        self.geometric_lines(lines, r);

        let k = u64::from(self.input.k);
        let pr = pow_u64(self.p, r);
        let p_e1 = pow_u64(self.p, high_cut + 1);
        let ls = l_s.unsigned_abs();
        let bound_a = Exact::frac(
            BigInt::from(ls) * &pr * self.p + BigInt::from(k) * (&pr - 1u32),
            &p_e1 * (&pr - 1u32),
        );
        lines.cmp(
            "|row3| < |l_s|/p^{E} * 1/(1-1/p^{r_s}) + k/p^{E+1}",
            Exact::pfrac(&row3.abs()),
            Lt,
            bound_a.clone(),
        );
        let bound_b = Exact::frac(BigInt::from(32 * k * self.p + 31 * k), &p_e1 * 31u32);
        lines.cmp("... < (1/p^{E}) (32k/31 + k/p)", bound_a, Lt, bound_b.clone());
        let bound_c = Exact::frac(2 * k, pow_u64(self.p, high_cut));
        lines.cmp("(1/p^{E}) (32k/31 + k/p) < 2k/p^{E}", bound_b, Lt, bound_c.clone());
        lines.cmp(
            "2k/p^{E} < 1/p^{r_s^3-i0 r_s}",
            bound_c,
            Lt,
            Exact::frac(1, pow_u64(self.p, cube - i0 * r)),
        );
        lines.ints("alpha >= r_s^3 - (i0+1) r_s", alpha, Ge, cube - (i0 + 1) * r);
        lines.ints("r_s^3 - (i0+1) r_s > 5q", cube - (i0 + 1) * r, Gt, 5 * self.q());
        final_line(lines, &sigma, self.target());
        Ok(())
    }
}
