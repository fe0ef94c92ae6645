//! The von Neumann radical n(G, u) as the annihilator of the closure of the
//! characterized subgroup, and a table of known answers.

use serde::Serialize;

use crate::charscan::{scan_s_u_prufer_dual_with, scan_s_u_with, ScanResult};
use crate::error::Result;
use crate::exactnum::ExponentGuard;
use crate::groups::{annihilator, closure, AmbientGroup, Subgroup, SubgroupDescriptor as D};
use crate::sequences::SequenceSpec;

/// Indices up to which scan witnesses are checked by direct evaluation.
pub const DEFAULT_N_MAX: u64 = 60;

/// One step of the radical computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProvenanceStep {
    pub step: &'static str,
    pub rule: String,
    pub input: String,
    pub output: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RadicalResult {
    pub spec: SequenceSpec,
    pub scan: ScanResult,
    pub closed: Subgroup,
    pub radical: Subgroup,
    pub provenance: Vec<ProvenanceStep>,
}

/// Scan, close, annihilate. `bound` is the denominator bound for circle
/// duals, `window` the integer window for Prüfer duals.
pub fn compute_radical(spec: &SequenceSpec, bound: u64, window: u64) -> Result<RadicalResult> {
    compute_radical_with(spec, bound, window, DEFAULT_N_MAX, ExponentGuard::default())
}

pub fn compute_radical_with(
    spec: &SequenceSpec,
    bound: u64,
    window: u64,
    n_max: u64,
    guard: ExponentGuard,
) -> Result<RadicalResult> {
    let spec = spec.validated()?;
    let scan = match spec {
        SequenceSpec::PruferSum { .. } => scan_s_u_prufer_dual_with(&spec, window, n_max, guard)?,
        _ => scan_s_u_with(&spec, bound, n_max, guard)?,
    };
    let closed = closure(&scan.recognized)?;
    let radical = annihilator(&closed)?;
    let window_text = match scan.dual {
        AmbientGroup::PAdic(_) => format!("integers in [-{0}, {0}]", scan.bound),
        _ => format!("denominators up to {}", scan.bound),
    };
    let provenance = vec![
        ProvenanceStep {
            step: "scan",
            rule: format!(
                "exact limit classification of {} window points, {}",
                scan.window_size, window_text
            ),
            input: spec.to_string(),
            output: scan.recognized.to_string(),
        },
        ProvenanceStep {
            step: "closure",
            rule: closure_rule(&scan.recognized).into(),
            input: scan.recognized.to_string(),
            output: closed.to_string(),
        },
        ProvenanceStep {
            step: "annihilator",
            rule: annihilator_rule(&closed).into(),
            input: closed.to_string(),
            output: radical.to_string(),
        },
    ];
    Ok(RadicalResult {
        spec,
        scan,
        closed,
        radical,
        provenance,
    })
}

fn right_factor(sub: &Subgroup) -> D {
    match sub.descriptor() {
        D::SplitProduct(_, r) => (**r).clone(),
        d => d.clone(),
    }
}

fn closure_rule(sub: &Subgroup) -> &'static str {
    match right_factor(sub) {
        D::PruferInCircle(_) => "Z(p^inf) is dense in T",
        D::MultiplesOfQ(_) => "bZ closes to p^v(b) Zp in Zp",
        D::Zero | D::Whole => "trivial and whole subgroups are closed",
        _ => "finite subgroups are closed",
    }
}

fn annihilator_rule(sub: &Subgroup) -> &'static str {
    match (sub.ambient(), sub.descriptor()) {
        (_, D::Zero) => "annihilator of 0 is the whole predual",
        (_, D::Whole) => "annihilator of the whole dual is 0",
        (AmbientGroup::Circle, D::CyclicInCircle(_)) => "annihilator of Z(q) in T is qZ",
        (AmbientGroup::SplitDual(_), _) => "annihilators of split products are taken factorwise",
        (AmbientGroup::PAdic(_), _) => "annihilator of p^v Zp is Z(p^v)",
        _ => "annihilator rule table",
    }
}

/// Whether the radical is finite and non-trivial.
pub fn almost_map_check(result: &RadicalResult) -> bool {
    result.radical.is_finite_nontrivial()
}

/// Parameter patterns with a known radical.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegistryRule {
    GammaEqualsQ,
    GammaOne,
    SplitSum,
    PruferSum,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegistryEntry {
    pub rule: RegistryRule,
    pub family: &'static str,
    pub pattern: &'static str,
    pub expected: &'static str,
    pub statement: &'static str,
    /// The radical is finite and non-trivial, so it differs from its own
    /// radical.
    pub finite_nontrivial: bool,
}

impl RegistryEntry {
    pub fn applies(&self, spec: &SequenceSpec) -> bool {
        match (self.rule, *spec) {
            (RegistryRule::GammaEqualsQ, SequenceSpec::IntegerGamma { q, gamma }) => gamma == q,
            (RegistryRule::GammaOne, SequenceSpec::IntegerGamma { gamma, .. }) => gamma == 1,
            (RegistryRule::SplitSum, SequenceSpec::SplitSum { .. }) => true,
            (RegistryRule::PruferSum, SequenceSpec::PruferSum { .. }) => true,
            _ => false,
        }
    }

    /// The expected radical for a spec this entry applies to.
    pub fn expected_for(&self, spec: &SequenceSpec) -> Option<Subgroup> {
        if !self.applies(spec) {
            return None;
        }
        let ambient = spec.ambient();
        let desc = match *spec {
            SequenceSpec::IntegerGamma { q, .. } if self.rule == RegistryRule::GammaEqualsQ => D::MultiplesOfQ(q),
            SequenceSpec::IntegerGamma { .. } => D::Whole,
            SequenceSpec::SplitSum { .. } => D::SplitProduct(Box::new(D::Whole), Box::new(D::Zero)),
            SequenceSpec::PruferSum { p, c } => D::FiniteCyclicPrufer { p, c },
        };
        Subgroup::new(ambient, desc).ok()
    }
}

pub fn registry() -> Vec<RegistryEntry> {
    vec![
        RegistryEntry {
            rule: RegistryRule::GammaEqualsQ,
            family: "integer-gamma",
            pattern: "gamma = q",
            expected: "qZ(q)",
            statement: "the radical of Z is qZ",
            finite_nontrivial: false,
        },
        RegistryEntry {
            rule: RegistryRule::GammaOne,
            family: "integer-gamma",
            pattern: "gamma = 1",
            expected: "Z",
            statement: "the radical of Z is all of Z",
            finite_nontrivial: false,
        },
        RegistryEntry {
            rule: RegistryRule::SplitSum,
            family: "split-sum",
            pattern: "any prime p",
            expected: "Z(p)+0",
            statement: "the radical of Z(p)+Z is the finite factor Z(p)",
            finite_nontrivial: true,
        },
        RegistryEntry {
            rule: RegistryRule::PruferSum,
            family: "prufer-sum",
            pattern: "any prime p, c >= 1",
            expected: "Z(p^c)",
            statement: "the radical of Z(p^inf) is the cyclic subgroup generated by u",
            finite_nontrivial: true,
        },
    ]
}

/// The registry entry covering `spec` and its expected radical.
pub fn lookup(spec: &SequenceSpec) -> Option<(RegistryEntry, Subgroup)> {
    registry()
        .into_iter()
        .find_map(|e| e.expected_for(spec).map(|s| (e, s)))
}
