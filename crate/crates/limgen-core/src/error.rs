use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("finite language not permitted")]
    FiniteLanguage,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("saturation requires finite closure")]
    SaturationNeedsFiniteClosure,
    #[error("witness size {0} is not a perfect square")]
    NotPerfectSquare(usize),
    #[error("shrink requires noise level at least 2, got {0}")]
    ShrinkNoiseTooSmall(usize),
    #[error("shrink preconditions violated: empty consistent set or infinite closure")]
    ShrinkPrecondition,
    #[error("noise must lie outside the target")]
    NoiseInsideTarget,
    #[error("duplicate noise element")]
    DuplicateNoise,
    #[error("bad schedule: {0}")]
    BadSchedule(String),
    #[error("generator queried before any input")]
    EmptyHistory,
    #[error("settle time not certifiable at this budget")]
    SettleNotCertifiable,
    #[error("collections do not form an increasing chain")]
    NotAChain,
    #[error("target not in the indicated chain level")]
    TargetNotInLevel,
    #[error("chain level {level} out of range ({len} levels stored)")]
    LevelOutOfRange { level: usize, len: usize },
    #[error("scattered case: use the scattered construction")]
    ScatteredCase,
    #[error("classification inconclusive: increase the horizon")]
    Inconclusive,
    #[error("constructed language has no columns")]
    EmptyLanguage,
    #[error("horizon must be at least 1")]
    EmptyPlan,
    #[error("steps must be at least 1")]
    NoSteps,
    #[error("unknown suite: {0}")]
    UnknownSuite(String),
    #[error("unknown language: {0}")]
    UnknownLanguage(String),
    #[error("operation requires an explicit collection")]
    NotExplicit,
    #[error("duplicate language name: {0}")]
    DuplicateName(String),
    #[error("languages {0} and {1} denote the same set")]
    DuplicateDenotation(String, String),
    #[error("collection has no languages")]
    EmptyCollection,
    #[error("generator io: {0}")]
    GeneratorIo(String),
    #[error("bad element: {0}")]
    BadElement(String),
    #[error("bad trace: {0}")]
    BadTrace(String),
}
