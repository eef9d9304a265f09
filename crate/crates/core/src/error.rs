use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("polynomial is reducible over Q")]
    Reducible,
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("field is not totally real")]
    NotTotallyReal,
    #[error("degree {0} out of range (expected 3 or 4)")]
    DegreeOutOfRange(usize),
    #[error("maximal order computation failed at p = {p}: {detail}")]
    Maximalization { p: String, detail: String },
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("relation search failed: {0}")]
    RelationSearch(String),
    #[error("unit search failed: {0}")]
    UnitSearch(String),
    #[error("units insufficient at 3: {0}")]
    UnitSaturation(String),
    #[error("ideal is not coprime to the modulus")]
    NotCoprime,
    #[error("ideals belong to different fields")]
    MixedFields,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("wrong discriminant for {field}: expected {expected}, found {found}")]
    WrongDiscriminant { field: String, expected: String, found: String },
    #[error("wrong splitting of {p}: {detail}")]
    WrongSplitting { p: String, detail: String },
    #[error("class number of the cubic field is {h}, not divisible by 4")]
    ClassNumberCondition { h: String },
    #[error("ray class quotient depends on the exponent at 3")]
    UnstableModulus,
    #[error("ray class quotient has dimension {found}, expected {expected}")]
    RayDimension { expected: usize, found: usize },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
