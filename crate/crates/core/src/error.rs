use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("field size {0} is outside the supported range")]
    FieldTooLarge(u64),
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("cannot decide {0} at the current precision")]
    Indeterminate(&'static str),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("matrix is singular")]
    Singular,
    #[error("element is not of finite order within {0}")]
    NotTorsion(u64),
    #[error("generator {0} does not fix the vertex")]
    NotFixing(usize),
    #[error("invalid group tag: {0}")]
    InvalidTag(String),
    #[error("{sub} is not a subgroup of {amb}")]
    NotEmbeddable { sub: String, amb: String },
    #[error("unsupported embedding: {0}")]
    UnsupportedEmbedding(String),
    #[error("malformed tree: {0}")]
    MalformedTree(String),
    #[error("contraction fails along {path:?}: {reason}")]
    ContractionFailed { path: Vec<usize>, reason: String },
    #[error("no Schottky quotient: {0}")]
    NoQuotient(String),
    #[error("case constraint violated: {0}")]
    CaseConstraint(String),
    #[error("not in table: {0}")]
    NotInTable(String),
    #[error("genus {0} is below 2")]
    GenusTooSmall(String),
    #[error("improper isometric circle")]
    ImproperDisk,
    #[error("not an involution")]
    NotInvolution,
    #[error("missing data: {0}")]
    MissingData(String),
    #[error("unsupported group order {0}")]
    UnsupportedOrder(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
