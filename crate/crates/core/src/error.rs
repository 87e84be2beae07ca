use thiserror::Error;

/// Errors raised by the lab's constructors and operations.
///
/// Every variant is a precondition failure; none of the operations here
/// can fail for any other reason once their inputs are valid.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("candidate count must be at least {min}, got {got}")]
    TooFewCandidates { min: usize, got: usize },
    #[error("voter count must be at least {min}, got {got}")]
    TooFewVoters { min: usize, got: usize },
    #[error("scale bound exceeded: {0} (set ARROWLAB_SCALE_OVERRIDE=1 to lift it)")]
    ScaleExceeded(String),
    #[error("invalid linear order {0:?}: not a permutation of 0..m")]
    InvalidOrder(Vec<usize>),
    #[error("invalid voter permutation {0:?}")]
    InvalidPermutation(Vec<usize>),
    #[error("candidate {0} out of range for {1} candidates")]
    CandidateOutOfRange(usize, usize),
    #[error("a candidate cannot be compared with itself ({0})")]
    SameCandidate(usize),
    #[error("voter {0} out of range for {1} voters")]
    VoterOutOfRange(usize, usize),
    #[error("index {0} out of range (limit {1})")]
    IndexOutOfRange(usize, usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },
    #[error("invalid rational {0:?}")]
    InvalidRational(String),
    #[error("epsilon {eps} outside the admissible interval (0, {bound})")]
    EpsilonOutOfRange { eps: String, bound: String },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("distribution lacks full support")]
    NoFullSupport,
    #[error("distribution is not permutation-invariant")]
    NotPermutationInvariant,
    #[error("voting rule is not Pareto")]
    NotPareto,
    #[error("invalid voting rule table: {0}")]
    InvalidTable(String),
    #[error("invalid metric fixture: {0}")]
    InvalidFixture(String),
    #[error("unsupported file format version {0}")]
    UnsupportedFormat(u32),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn mismatch(expected: impl ToString, got: impl ToString) -> Error {
    Error::DimensionMismatch {
        expected: expected.to_string(),
        got: got.to_string(),
    }
}
