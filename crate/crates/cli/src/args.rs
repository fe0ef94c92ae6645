use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use tseq_core::error::{Error, Result};
use tseq_core::exactnum::DEFAULT_GUARD_BITS;
use tseq_core::sequences::SequenceSpec;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "tseq",
    version,
    about = "Exact T-sequence constructions, non-membership checks, characterized subgroups and radicals"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Report format; csv is only available for verify-tseq gap tables
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Refuse powers whose bit length would exceed this
    #[arg(long, global = true, env = "TSEQ_GUARD_BITS", default_value_t = DEFAULT_GUARD_BITS)]
    pub guard_bits: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Print one term of a sequence
    Term(TermArgs),
    /// Exhaustively check that g is outside A(k, m) up to a horizon
    VerifyTseq(VerifyArgs),
    /// Evaluate inequality chains on one pattern or a seeded sample
    CheckInequalities(ChainArgs),
    /// Compute the characterized subgroup on a finite dual window
    Scan(ScanArgs),
    /// Compute the von Neumann radical
    Radical(RadicalArgs),
    /// List known radicals, optionally recomputing each one
    Registry(RegistryArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Term(_) => "term",
            Command::VerifyTseq(_) => "verify-tseq",
            Command::CheckInequalities(_) => "check-inequalities",
            Command::Scan(_) => "scan",
            Command::Radical(_) => "radical",
            Command::Registry(_) => "registry",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    SplitSum,
    PruferSum,
    IntegerGamma,
}

#[derive(Debug, Args, Serialize)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Prime of split-sum and prufer-sum
    #[arg(long)]
    pub p: Option<u64>,
    /// Base of integer-gamma
    #[arg(long)]
    pub q: Option<u64>,
    /// Shift of integer-gamma; defaults to q
    #[arg(long)]
    pub gamma: Option<u64>,
    /// u = 1/p^c for prufer-sum
    #[arg(long)]
    pub c: Option<u64>,
    /// Torsion coefficient of the odd split-sum terms
    #[arg(long, default_value_t = 1)]
    pub ae: u64,
}

fn required(v: Option<u64>, flag: &str, family: &str) -> Result<u64> {
    v.ok_or_else(|| Error::Parse(format!("--{flag} is required for {family}")))
}

impl FamilyArgs {
    pub fn spec(&self) -> Result<SequenceSpec> {
        match self.family {
            Family::SplitSum => SequenceSpec::SplitSum {
                p: required(self.p, "p", "split-sum")?,
                a_e: self.ae,
            }
            .validated(),
            Family::PruferSum => SequenceSpec::prufer_sum(
                required(self.p, "p", "prufer-sum")?,
                required(self.c, "c", "prufer-sum")?,
            ),
            Family::IntegerGamma => {
                let q = required(self.q, "q", "integer-gamma")?;
                SequenceSpec::integer_gamma(q, self.gamma.unwrap_or(q))
            }
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct TermArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Sequence index, starting at 1
    #[arg(long)]
    pub n: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Target element, e.g. `3`, `e+1`, `1/8`
    #[arg(long, allow_hyphen_values = true)]
    pub g: String,
    #[arg(long, default_value_t = 0)]
    pub k: u32,
    /// Smallest admissible index; defaults to the witness bound
    #[arg(long)]
    pub m: Option<u64>,
    /// Largest index searched; defaults to m + 16
    #[arg(long)]
    pub horizon: Option<u64>,
    /// Also attach this many sampled inequality chains
    #[arg(long, default_value_t = 0)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct ChainArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Target element; needed by every case except weighted-sum and geometric-tail
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub k: u32,
    /// Defaults to the witness bound of g
    #[arg(long)]
    pub m: Option<u64>,
    /// Case id for a single pattern, e.g. `mixed`
    #[arg(long)]
    pub case: Option<String>,
    /// Single pattern such as `1*d41-2*d60`; omit to run a sampled suite
    #[arg(long, allow_hyphen_values = true)]
    pub pattern: Option<String>,
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Flip the verdict of one displayed line (testing aid)
    #[arg(long, hide = true)]
    pub inject_fault: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct ScanArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Largest circle denominator scanned
    #[arg(long, default_value_t = 50)]
    pub bound: u64,
    /// Integer window for prufer-sum duals
    #[arg(long, default_value_t = 16)]
    pub window: u64,
    /// Witnesses are checked by direct evaluation up to this index
    #[arg(long, default_value_t = 60)]
    pub n_max: u64,
    /// Classify a single character instead, e.g. `1/3` or `(0, 1/4)`
    #[arg(long, allow_hyphen_values = true)]
    pub chi: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct RadicalArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 50)]
    pub bound: u64,
    #[arg(long, default_value_t = 16)]
    pub window: u64,
    #[arg(long, default_value_t = 60)]
    pub n_max: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct RegistryArgs {
    /// Recompute every entry for p, q in {2, 3, 5}, gamma in {1, q}, c in {1, 2}
    #[arg(long)]
    pub check: bool,
    #[arg(long, default_value_t = 32)]
    pub bound: u64,
    /// Prüfer window; raised to p^c where that is larger
    #[arg(long, default_value_t = 32)]
    pub window: u64,
    #[arg(long, default_value_t = 24)]
    pub n_max: u64,
}
