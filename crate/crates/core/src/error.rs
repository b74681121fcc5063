use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("generator index {index} outside alphabet of rank {rank}")]
    LetterOutOfRange { index: usize, rank: usize },

    #[error("alphabet rank must be at least 1")]
    EmptyAlphabet,

    #[error("alphabet mismatch: rank {left} vs rank {right}")]
    AlphabetMismatch { left: usize, right: usize },

    #[error("invalid word syntax: {0}")]
    WordSyntax(String),

    #[error("graph is not connected")]
    Disconnected,

    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),

    #[error("word is not a member of the subgroup")]
    NotAMember,

    #[error("modulus must be at least 1")]
    ZeroModulus,

    #[error("element has {got} components, ambient has {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("ambient mismatch")]
    AmbientMismatch,

    #[error("homomorphism given on {got} basis elements, graph has rank {expected}")]
    HomomorphismArity { expected: usize, got: usize },

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("ambient order {order} exceeds bound {bound}")]
    AmbientTooLarge { order: String, bound: u64 },

    #[error("cannot mix torsion-sum and Q/Z elements in one ambient")]
    MixedTorsionKinds,

    #[error("invalid torsion element: {0}")]
    InvalidTorsion(String),

    #[error("parameter {name} = {value} must be at least 2")]
    ParameterRange { name: &'static str, value: u64 },

    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
