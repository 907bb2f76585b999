use thiserror::Error;

/// Errors raised by the concept algebra and its file formats.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("property does not match domain of feature `{feature}`: {detail}")]
    DomainMismatch { feature: String, detail: String },

    #[error("property on feature `{feature}` has width {width} exceeding 2*epsilon = {cap}")]
    CapExceeded {
        feature: String,
        width: f64,
        cap: f64,
    },

    #[error("malformed property: {0}")]
    Malformed(String),

    #[error("concepts or instances belong to different schemas")]
    SchemaMismatch,

    #[error("unknown feature `{0}`")]
    UnknownFeature(String),

    #[error("invalid schema: {0}")]
    InvalidSchema(String),

    #[error("instance has {got} values but schema has {expected} features")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("feature `{0}` has a symbolic domain and cannot hold a real-valued instance")]
    SymbolDomainInInstance(String),

    #[error("cannot combine {left} and {right} properties on feature `{feature}`")]
    KindMismatch {
        feature: String,
        left: &'static str,
        right: &'static str,
    },

    #[error("feature `{0}` has an infinite value domain")]
    InfiniteDomain(String),

    #[error("concept is not a member of the finite space")]
    NotInSpace,

    #[error("{0}")]
    Policy(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable code used by the command-line interface.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DomainMismatch { .. } => "DomainMismatch",
            Error::CapExceeded { .. } => "CapExceeded",
            Error::Malformed(_) => "Malformed",
            Error::SchemaMismatch => "SchemaMismatch",
            Error::UnknownFeature(_) => "UnknownFeature",
            Error::InvalidSchema(_) => "InvalidSchema",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::SymbolDomainInInstance(_) => "SymbolDomainInInstance",
            Error::KindMismatch { .. } => "KindMismatch",
            Error::InfiniteDomain(_) => "InfiniteDomain",
            Error::NotInSpace => "NotInSpace",
            Error::Policy(_) => "PolicyError",
            Error::Config(_) => "ConfigError",
            Error::Parse(_) => "ParseError",
            Error::Io(_) => "IoError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
