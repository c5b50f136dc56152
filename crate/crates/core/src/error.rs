use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("not a monoid homomorphism: {0}")]
    InvalidHom(String),
    #[error("cone is not pointed: {0}")]
    NotPointed(String),
    #[error("not a face: {0}")]
    NotAFace(String),
    #[error("monoid must be sharp: {0}")]
    NotSharp(String),
    #[error("monoid must be saturated: {0}")]
    NotSaturated(String),
    #[error("element not in monoid: {0}")]
    NotInMonoid(String),
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("incompatible morphisms: {0}")]
    Incompatible(String),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("invalid group action: {0}")]
    InvalidAction(String),
    #[error("groupoid is not strict: {0}")]
    NotStrict(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("{0}")]
    Document(String),
}

pub type Result<T> = std::result::Result<T, Error>;
