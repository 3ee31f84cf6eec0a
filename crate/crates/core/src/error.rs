use thiserror::Error;

/// Errors produced by the library. Parse errors carry the offending line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("election must have at least one candidate")]
    EmptyRoster,
    #[error("election must have at least one voter")]
    NoVoters,
    #[error("invalid candidate label {0:?}")]
    InvalidLabel(String),
    #[error("duplicate candidate label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown candidate {0}")]
    UnknownCandidate(String),
    #[error("vote {voter} is not a linear order over the roster: {reason}")]
    InvalidVote { voter: usize, reason: String },
    #[error("rule {0} is not score-based")]
    NotScoreBased(String),
    #[error("k-approval width must be at least 1")]
    InvalidApprovalWidth,
    #[error("a candidate cannot be compared with itself")]
    SameCandidate,
    #[error("odd parity requires every pair to be decided by a beats edge")]
    UnrealizableParity,
    #[error("invalid majority spec: {0}")]
    InvalidSpec(String),
    #[error("size must be positive")]
    InvalidSize,
    #[error("invalid cloning vector: {0}")]
    InvalidVector(String),
    #[error("malformed ordering assignment: {0}")]
    MalformedAssignment(String),
    #[error("ordering space of {space} assignments exceeds the limit of {limit}")]
    SearchSpaceTooLarge { space: u128, limit: u64 },
    #[error("success threshold must lie strictly between 0 and 1")]
    InvalidThreshold,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid cost function: {0}")]
    InvalidCost(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
