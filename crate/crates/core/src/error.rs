use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("column {index} has (numerically) zero norm")]
    ZeroColumn { index: usize },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("coherence needs at least two atoms")]
    SingleAtom,

    #[error("index {index} out of range for {len} atoms")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("duplicate atom index {index}")]
    DuplicateIndex { index: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid weakness parameter kappa = {0} (must lie in (0, 1])")]
    InvalidKappa(f64),

    #[error("coherence target not reached after {attempts} regeneration attempts")]
    CoherenceTargetUnreachable { attempts: usize },

    #[error("enumeration needs {required} subsets, budget is {budget}")]
    EnumerationBudgetExceeded { required: u128, budget: u128 },

    #[error(
        "selected atoms numerically dependent at step {step} (condition estimate {condition:e})"
    )]
    RankDeficientProjection { step: usize, condition: f64 },

    #[error("requested {requested} terms but only {available} were selected")]
    NotEnoughSelected { requested: usize, available: usize },

    #[error("RIP certificate of order {available} is below the required order {required}")]
    OrderTooSmall { required: usize, available: usize },

    #[error("RIP constant {delta} >= 1 makes the inequality vacuous")]
    DeltaTooLarge { delta: f64 },

    #[error("a sampled lower bound cannot certify an upper bound on the RIP constant")]
    UnsoundDeltaSource,

    #[error("schedule j={j}, m={m}, L={l} does not fit: {reason}")]
    ScheduleOutOfRange {
        j: usize,
        m: usize,
        l: usize,
        reason: String,
    },

    #[error("RIP assumption not verified: {0}")]
    DeltaAssumptionUnverified(String),

    #[error("hypothesis not met: {0}")]
    HypothesisUnmet(String),

    #[error("{steps} steps exceed the dictionary limit {limit}")]
    StepBudgetExceedsDictionary { steps: usize, limit: usize },

    #[error("unsupported algorithm for this check: {0}")]
    UnsupportedAlgorithm(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ZeroColumn { .. } => "ZeroColumn",
            Error::NonFinite => "NonFinite",
            Error::SingleAtom => "SingleAtom",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::DuplicateIndex { .. } => "DuplicateIndex",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::InvalidKappa(_) => "InvalidKappa",
            Error::CoherenceTargetUnreachable { .. } => "CoherenceTargetUnreachable",
            Error::EnumerationBudgetExceeded { .. } => "EnumerationBudgetExceeded",
            Error::RankDeficientProjection { .. } => "RankDeficientProjection",
            Error::NotEnoughSelected { .. } => "NotEnoughSelected",
            Error::OrderTooSmall { .. } => "OrderTooSmall",
            Error::DeltaTooLarge { .. } => "DeltaTooLarge",
            Error::UnsoundDeltaSource => "UnsoundDeltaSource",
            Error::ScheduleOutOfRange { .. } => "ScheduleOutOfRange",
            Error::DeltaAssumptionUnverified(_) => "DeltaAssumptionUnverified",
            Error::HypothesisUnmet(_) => "HypothesisUnmet",
            Error::StepBudgetExceedsDictionary { .. } => "StepBudgetExceedsDictionary",
            Error::UnsupportedAlgorithm(_) => "UnsupportedAlgorithm",
            Error::Format(_) => "Format",
            Error::Io(_) => "Io",
            Error::Csv(_) => "Csv",
        }
    }
}
