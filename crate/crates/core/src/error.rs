use thiserror::Error;

/// Every failure the library can report. Verification failures are *not*
/// errors; they surface as entries in the corresponding report types.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("prime {0} is too large (limit is 2^32)")]
    PrimeTooLarge(u64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("matrix is zero")]
    ZeroMatrix,
    #[error("vector is zero")]
    ZeroVector,
    #[error("generator {0} is not invertible")]
    NotInvertible(usize),
    #[error("group closure exceeded cap of {0} elements")]
    CapExceeded(usize),
    #[error("element {0} is out of range")]
    BadElement(usize),
    #[error("the orbit of the subspace does not span the ambient space")]
    OrbitDoesNotSpan,
    #[error("the element acts as the identity")]
    IdentityElement,
    #[error("the element acts as a scalar multiple of the identity")]
    ScalarMultipleOfIdentity,
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("no z met the survivor bound within {0} trials")]
    BudgetExhausted(usize),
    #[error("not a probability distribution: {0}")]
    NotADistribution(String),
    #[error("pair ({0}, {1}) is not separated by the function")]
    PairNotSeparated(usize, usize),
    #[error("matched pair ({first}, {second}) for coordinate {coordinate} crosses prefix classes")]
    MatchingCrossesPrefixClass {
        coordinate: usize,
        first: usize,
        second: usize,
    },
    #[error("the entropy audit only applies to special-form 2-query codes")]
    NotSpecialForm,
    #[error("characteristic 2 is not allowed for this fixture")]
    CharTwo,
    #[error("no element of order {order} exists in GF({p})")]
    NoRootOfUnity { order: u64, p: u64 },
    #[error("characteristic divides the degree {0}")]
    BadCharacteristic(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
