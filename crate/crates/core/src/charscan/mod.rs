//! Limit classification of pairing sequences and windowed recognition of the
//! characterized subgroup.

mod classify;
mod scan;

pub use classify::{
    classify_pairing_limit, classify_subsequences, witness_violations, ConvergenceClass, Decay, DecayShape,
    NonConvergenceWitness, PairingLimit,
};
pub use scan::{
    scan_s_u, scan_s_u_prufer_dual, scan_s_u_prufer_dual_with, scan_s_u_with, RecognitionBasis, ScanResult,
    WitnessAudit,
};
