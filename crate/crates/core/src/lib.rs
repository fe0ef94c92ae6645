//! Exact construction and desk-scale verification of explicit T-sequences
//! on ℤ, ℤ(p)⊕ℤ and the Prüfer groups ℤ(p^∞), together with the subgroups
//! they characterize in the dual and the resulting von Neumann radicals.
//!
//! Module map:
//!
//! * [`exactnum`]: big integers, ℚ/ℤ points, p-adic characters, pairings.
//! * [`groups`]: symbolic subgroup descriptors, windows, closures, annihilators.
//! * [`sequences`]: the three sequence families with memoized exact terms.
//! * [`tverify`]: bounded-sum enumeration, non-membership search and the
//!   exact inequality-chain checker.
//! * [`charscan`]: pairing-limit classification and the characterized subgroup.
//! * [`radical`]: scan, closure and annihilator composed into the radical.

pub mod charscan;
pub mod error;
pub mod exactnum;
pub mod groups;
pub mod radical;
pub mod report;
pub mod sequences;
pub mod tverify;

pub use error::{Error, Result};
