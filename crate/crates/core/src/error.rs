use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("malformed modulus: {0}")]
    MalformedModulus(String),

    #[error("modulus {0} is reducible over Z_{1}")]
    ReducibleModulus(String, u32),

    #[error("field order {q} exceeds the configured bound {max}")]
    FieldTooLarge { q: u128, max: u64 },

    #[error("operands belong to different fields")]
    FieldMismatch,

    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    #[error("digit {digit} is out of range for a field of order {q}")]
    DigitOutOfRange { digit: u32, q: u32 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("unknown register `{0}`")]
    UnknownRegister(String),

    #[error("state needs {needed} amplitudes, bound is {max}")]
    TooManyAmplitudes { needed: u128, max: u64 },

    #[error("state norm {0} deviates from 1")]
    NormDrift(f64),

    #[error("enumeration domain of {size} points exceeds bound {max}")]
    DomainTooLarge { size: u128, max: u64 },

    #[error("share {0} has already been consumed")]
    ShareConsumed(usize),

    #[error("share index {index} is outside 1..={k}")]
    ShareIndexOutOfRange { index: usize, k: usize },

    #[error("adversary structure is not downward-closed")]
    NotDownwardClosed,

    #[error("player set of size {players} exceeds bound {max}")]
    TooManyPlayers { players: usize, max: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by a problem instance too big for dense
    /// simulation or exhaustive enumeration.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            Error::FieldTooLarge { .. }
                | Error::TooManyAmplitudes { .. }
                | Error::DomainTooLarge { .. }
                | Error::TooManyPlayers { .. }
                | Error::Overflow(_)
        )
    }
}
