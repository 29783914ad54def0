use thiserror::Error;

/// Errors raised anywhere in the protection pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    CompositeCharacteristic(u32),
    #[error("extension degree must be >= 1, got {0}")]
    InvalidDegree(u32),
    #[error("field order {p}^{r} exceeds the supported maximum of 65536")]
    FieldTooLarge { p: u32, r: u32 },
    #[error("reduction polynomial {0:?} has the wrong degree or is malformed")]
    MalformedPolynomial(Vec<u32>),
    #[error("reduction polynomial {0:?} is reducible over the prime field")]
    ReduciblePolynomial(Vec<u32>),
    #[error("value {value} is out of range for a field of order {q}")]
    ValueOutOfRange { value: u32, q: u32 },
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("matrix is not square or does not match the right-hand side")]
    DimensionMismatch,
    #[error("linear system is singular (rank {rank} < {needed})")]
    Singular { rank: usize, needed: usize },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("node `{0}` is not a relay")]
    NotARelay(String),
    #[error("network has no relay nodes")]
    NoRelays,

    #[error("t must satisfy 1 <= t < n (n = {n}, t = {t})")]
    InvalidProtection { n: usize, t: usize },
    #[error("round {round} is outside the session (length {len})")]
    RoundOutOfRange { round: usize, len: usize },
    #[error("round data does not match the working set: {0}")]
    DataMismatch(String),
    #[error("unrecoverable: {unknowns} lost units but only rank {rank} among received equations")]
    Unrecoverable { unknowns: usize, rank: usize },
    #[error("received equations are inconsistent with the recovered data")]
    Inconsistent,
    #[error("node `{node}` carries {degree} connections but only t = {t} are protected")]
    Unprotectable { node: String, degree: usize, t: usize },

    #[error("scenario: {0}")]
    Scenario(String),
    #[error("range too large: {0}")]
    RangeTooLarge(String),
    #[error("output: {0}")]
    Output(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
