use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("power {base}^{exponent} needs about {bits} bits, above the guard of {limit} bits")]
    ExponentTooLarge {
        base: u64,
        exponent: u64,
        bits: u64,
        limit: u64,
    },

    #[error("p-adic precision exhausted: need {needed} digits, have {available}")]
    PrecisionExhausted { needed: u64, available: u64 },

    #[error("element and character belong to different ambient groups: {0}")]
    MismatchedAmbient(String),

    #[error("unsupported ambient: {0}")]
    UnsupportedAmbient(String),

    #[error("target element must be non-zero")]
    ZeroTarget,

    #[error("no valid gap index i0 for r_s = {r_s} with {blocked} later indices")]
    NoValidGap { r_s: u64, blocked: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("unsupported character: {0}")]
    UnsupportedCharacter(String),

    #[error("recognition ambiguous: candidates {candidates:?} all match accepted set {accepted:?}")]
    RecognitionAmbiguous {
        accepted: Vec<String>,
        candidates: Vec<String>,
    },

    #[error("recognition failed: no candidate matches accepted set {accepted:?}")]
    RecognitionFailed { accepted: Vec<String> },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}
