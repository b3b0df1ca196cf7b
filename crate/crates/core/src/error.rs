use thiserror::Error;

use crate::verify::VerificationReport;

/// Everything that can go wrong while building or checking a design.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u32),

    #[error("invalid modulus polynomial: {0}")]
    InvalidModulus(String),

    #[error("operands belong to different fields")]
    FieldMismatch,

    #[error("invalid group chain: {0}")]
    InvalidChain(String),

    #[error("element code {code} is not in layer {layer}")]
    NotInLayer { code: u32, layer: usize },

    #[error("layer {layer} is out of range 1..={layers}")]
    LayerOutOfRange { layer: usize, layers: usize },

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("group mismatch: {0}")]
    GroupMismatch(String),

    #[error("invalid generator matrix: {0}")]
    Generator(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid permutation: {0}")]
    Permutation(String),

    #[error("verification failed: {0}")]
    Verification(Box<VerificationReport>),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            input: input.to_string(),
            reason: reason.into(),
        }
    }
}
