use std::fmt;

use thiserror::Error;

/// Hypotheses checked before the compatibility-bound and discrimination
/// computations run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Hypothesis {
    Contraction,
    Disjointness,
    HalfDerivative,
    Symmetry,
    CommonDomain,
    DistinctSystems,
    /// `min C(G)` must sit at the left end of the normalized domain.
    GMinAtOrigin,
    /// `0 < min C(F) < 1/2` in normalized coordinates.
    EpsilonRange,
    /// Some map of G fixes the left endpoint.
    GFixesOrigin,
    Beta0Positive,
    GOneBound,
    FOneBound,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Hypothesis::Contraction => "contraction",
            Hypothesis::Disjointness => "disjoint images",
            Hypothesis::HalfDerivative => "half-derivative",
            Hypothesis::Symmetry => "symmetry",
            Hypothesis::CommonDomain => "common domain",
            Hypothesis::DistinctSystems => "distinct systems",
            Hypothesis::GMinAtOrigin => "min C(G) = min I",
            Hypothesis::EpsilonRange => "0 < min C(F) < 1/2",
            Hypothesis::GFixesOrigin => "g_1(min I) = min I",
            Hypothesis::Beta0Positive => "beta_0 > 0",
            Hypothesis::GOneBound => "g_1(x) < x/2",
            Hypothesis::FOneBound => "f_1(x) >= eps/2 + x/2",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("interval [{lo}, {hi}] is empty or degenerate")]
    DegenerateInterval { lo: String, hi: String },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("cannot parse scalar {0:?}")]
    ParseScalar(String),
    #[error("map is not strictly monotone on its domain")]
    NotMonotone,
    #[error("zero slope")]
    ZeroSlope,

    #[error("continued fraction too short: symbol {index} lies within {bound} of a breakpoint")]
    PrecisionInsufficient { index: usize, bound: String },
    #[error("insufficient prefix: {0}")]
    InsufficientPrefix(String),
    #[error("invalid word: {0}")]
    InvalidWord(String),

    #[error("system {0} is not contracting")]
    NotContracting(String),
    #[error("images overlap in system {0}")]
    ImageOverlap(String),
    #[error("restricted map image leaves [{lo}, {hi}]")]
    RestrictionEscapesDomain { lo: String, hi: String },
    #[error("composition leaves the affine/quadratic map classes")]
    UnsupportedComposition,

    #[error("depth {depth} exceeds the configured cap {cap}")]
    DepthCapExceeded { depth: usize, cap: usize },
    #[error("stage would hold {projected} intervals, above the limit {limit}")]
    TooManyIntervals { projected: u128, limit: u128 },
    #[error("systems do not share a domain")]
    DomainMismatch,
    #[error("unknown system label {0:?}")]
    UnknownSystem(String),
    #[error("extreme point did not reach tolerance within {0} steps")]
    NonConvergence(usize),
    #[error("map {0} does not fix the left endpoint of the domain")]
    NotFixing(usize),
    #[error("invalid address: {0}")]
    InvalidAddress(String),
    #[error("invalid gap label {0}")]
    InvalidGapLabel(usize),

    #[error("hypothesis violated ({hypothesis}): {detail}")]
    HypothesisViolation {
        hypothesis: Hypothesis,
        detail: String,
    },
    #[error("words agree on the first {0} symbols")]
    NoDisagreement(usize),
    #[error("regression needs at least 3 distinct scales")]
    DegenerateRegression,

    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn violation(hypothesis: Hypothesis, detail: impl Into<String>) -> Self {
        Error::HypothesisViolation {
            hypothesis,
            detail: detail.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
