use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse rational {0:?}")]
    ParseRational(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("player {player}: valuation out of domain ({detail})")]
    OutOfDomain { player: usize, detail: String },
    #[error("profile has {got} entries, expected {expected}")]
    ProfileLength { expected: usize, got: usize },
    #[error("alternative {index} out of range (function has {count})")]
    AlternativeOutOfRange { index: usize, count: usize },
    #[error("malformed protocol tree: {0}")]
    MalformedTree(String),
    #[error("scale exceeded: {what} needs {count} items, cap is {cap}")]
    ScaleExceeded { what: String, count: String, cap: u64 },
    #[error("player {player}: no breakpoint oracle available")]
    MissingOracle { player: usize },
    #[error("breakpoints must start at 0 and be strictly increasing")]
    UnsortedBreakpoints,
    #[error("integration bound must be non-negative")]
    NegativeUpper,
    #[error("player {player} is not single-parameter")]
    NotSingleParameter { player: usize },
    #[error("taxation violation for player {player}, alternative {alternative}: {detail}")]
    TaxationViolation { player: usize, alternative: usize, detail: String },
    #[error("invalid construction: {0}")]
    InvalidConstruction(String),
    #[error("cannot parse construction id {0:?}")]
    ParseConstructionId(String),
    #[error("cannot parse profile: {0}")]
    ParseProfile(String),
    #[error("cannot parse k range {0:?}")]
    ParseKRange(String),
    #[error("index {index} out of range (size {size})")]
    IndexOutOfRange { index: String, size: String },
    #[error("protocol integrity: {0}")]
    ProtocolIntegrity(String),
    #[error("reduction integrity: {intersecting} intersecting indices, expected exactly one")]
    ReductionIntegrity { intersecting: usize },
    #[error("payments are not unique for alternative {alternative}: price ranges over [{lo}, {hi}]")]
    NonUniquePayments { alternative: usize, lo: String, hi: String },
    #[error("no truthful menu exists: {0}")]
    Infeasible(String),
    #[error("search inconsistency: {0}")]
    SearchInconsistency(String),
    #[error("domain is not scalable: {0}")]
    NotScalable(String),
    #[error("domain is not convex: {0}")]
    NotConvex(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
