//! Verification of the T-sequence property at desk scale.
//!
//! A target `g` must avoid every set `A(k, m)` of bounded signed sums
//! `Σ l_i d_{n_i}` with distinct `n_i >= m` and `Σ|l_i| <= k+1`. Two kinds
//! of evidence are produced: an exhaustive search up to a finite horizon
//! ([`check_not_in_a`]) and exact evaluation of every estimate used to
//! rule out the infinite tail ([`check_inequality_chain`]), sampled over
//! random patterns by [`sample_chain_suite`].

mod chains;
mod exact;
mod gap;
mod nonmember;
mod pattern;
mod suite;

pub use chains::{
    check_inequality_chain, check_inequality_chain_with, CaseId, ChainContext, ChainInput, ChainReport, FaultInjection,
};
pub use exact::{Exact, InequalityLine, PFrac, Relation};
pub use gap::select_i0;
pub use nonmember::{check_not_in_a, prufer_q, witness_m, GapRow, GapTrend, GapValue, NonMembershipReport};
pub use pattern::{enumerate_patterns, pattern_value, BlockTerms, LeadIter, PatternIter, PatternTerm, SumPattern};
pub use suite::{sample_chain_suite, sample_chain_suite_with, ChainSuite, SkippedSample};
