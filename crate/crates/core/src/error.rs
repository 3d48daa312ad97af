use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid partition {0:?}: parts must be weakly decreasing")]
    InvalidPartition(Vec<u32>),
    #[error("partition {partition} does not fit in the {rows}x{cols} box")]
    OutsideBox {
        partition: String,
        rows: u32,
        cols: u32,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("polynomial division leaves a nonzero remainder")]
    NonDivisible,
    #[error("unknown generator name `{name}` on {space}")]
    UnknownName { name: String, space: String },
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),
    #[error("coefficient ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),
    #[error("operation not supported over {ring}: {what}")]
    UnsupportedRing { ring: String, what: String },
    #[error("class is not a unit: constant term must be 1")]
    NotAUnit,
    #[error("class is not homogeneous")]
    Inhomogeneous,
    #[error("codimension mismatch: expected {expected}, found {found}")]
    CodimMismatch { expected: i64, found: String },
    #[error("Chern class index {index} exceeds bundle rank {rank}")]
    RankOutOfRange { index: u32, rank: u32 },
    #[error(
        "gcd(ind(A), {remaining}) = {gcd} != 1; index reduction gives Z/{via_flag}Z \
         through X({remaining}) but Z/{via_sb}Z through SB(A)"
    )]
    GcdConditionFailed {
        gcd: u64,
        remaining: String,
        via_flag: u64,
        via_sb: u64,
    },
    #[error("removal position {position} is not allowed: {reason}")]
    PositionNotAllowed { position: usize, reason: String },
    #[error("side condition failed: {0}")]
    SideConditionFailed(String),
    #[error("rule not applicable: {0}")]
    NotApplicable(String),
    #[error("no Poincaré polynomial known for base motive {0}")]
    MissingBaseEntry(String),
    #[error("decomposition step {step} failed: {source}")]
    StepFailed { step: usize, source: Box<Error> },
    #[error("construction mismatch for {name}: display {display} but recomputed {computed}")]
    ConstructionMismatch {
        name: String,
        display: String,
        computed: String,
    },
}
