use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("basis size {size} exceeds cap {cap} (binomial({d}+{k}, {k}))")]
    BasisTooLarge { d: usize, k: usize, size: u128, cap: u128 },

    #[error("empty sample set passed to {op}")]
    EmptySet { op: &'static str },

    #[error("invalid argument for {op}: {detail}")]
    InvalidArgument { op: &'static str, detail: String },

    #[error("LP shape error: {0}")]
    LpShape(String),

    #[error("LP exceeds size cap: {rows} rows x {cols} cols")]
    LpTooLarge { rows: usize, cols: usize },

    #[error("simplex stalled after {pivots} pivots without convergence")]
    LpStalled { pivots: usize },

    #[error("perturbation set eta {eta} does not match 10*r = {expected}")]
    EtaMismatch { eta: f64, expected: f64 },

    #[error("hypothesis data invalid: field `{field}`: {detail}")]
    InvalidHypothesis { field: &'static str, detail: String },

    #[error("threshold mixing returned no feasible mixture after {attempts} attempts")]
    RoundingFailed { attempts: usize },

    #[error("partition validation failed in all {attempts} attempts")]
    PartitionFailed { attempts: usize },

    #[error("training failed in stage `{stage}`: {source}")]
    TrainFailed {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("soundness violation: certified point {index} was successfully attacked")]
    SoundnessViolation { index: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
