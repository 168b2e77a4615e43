use thiserror::Error;

/// Every failure the library reports.
///
/// The CLI maps [`Error::is_budget`] variants to exit code 3 and everything
/// else to exit code 2.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix is not expanding")]
    NotExpanding,
    #[error("matrix is not a similarity (A·Aᵀ is not a scalar matrix)")]
    SimilarityUnavailable,
    #[error("integer overflow in lattice arithmetic")]
    Overflow,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("digit set is not a complete residue system: {0}")]
    NotACrs(String),
    #[error("digit set does not contain 0")]
    ZeroNotInDigits,
    #[error("remainder sequence of {0:?} never reaches 0")]
    NonTerminating(Vec<i64>),
    #[error("candidate ball holds {points} lattice points, cap is {cap}")]
    CandidateBallTooLarge { points: u128, cap: u128 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("SEP search bound {bound} is below the least admissible block length {needed}")]
    SearchBudgetExceeded { bound: usize, needed: usize },
    #[error("intersection component {0} is empty")]
    EmptyIntersection(usize),
    #[error("uniqueness of the translation's representation was not established")]
    UniquenessNotEstablished,
    #[error("witness does not match the sequence: {0}")]
    InvalidWitness(String),
    #[error("digit {0:?} lies outside the {1}x{2} grid")]
    GridViolation(Vec<i64>, u64, u64),
    #[error("digit set must be {{0, m}}: {0}")]
    DigitShapeViolation(String),
    #[error("cloud would hold more than {0} points")]
    CloudTooLarge(usize),
    #[error("point set is empty")]
    EmptySet,
    #[error("depth {depth} gives {points} points, above the cap {cap}")]
    DepthTooLarge { depth: usize, points: u128, cap: u128 },
    #[error("nothing to rasterize")]
    EmptyCloud,
    #[error("system is not a number system")]
    NotANumberSystem,
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::SearchBudgetExceeded { .. }
                | Error::CandidateBallTooLarge { .. }
                | Error::CloudTooLarge(_)
                | Error::DepthTooLarge { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
