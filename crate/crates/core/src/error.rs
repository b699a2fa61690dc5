use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: rate constant must be positive, got {value}")]
    NonPositiveRate { line: usize, value: String },
    #[error("line {line}: reactant equals product")]
    TrivialReaction { line: usize },
    #[error("line {line}: unknown directive `{directive}`")]
    UnknownDirective { line: usize, directive: String },
    #[error("invalid number `{0}`")]
    BadNumber(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("network has no reactions")]
    NoReactions,
    #[error("species table is empty")]
    NoSpecies,
    #[error("duplicate species `{0}`")]
    DuplicateSpecies(String),
    #[error("invalid species name `{0}`")]
    BadSpeciesName(String),
    #[error("unknown species `{0}`")]
    UnknownSpecies(String),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("reaction {index}: reactant equals product")]
    TrivialReaction { index: usize },
    #[error("reaction {index}: rate constant must be positive")]
    NonPositiveRate { index: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StructureError {
    #[error("complex index {index} out of range (n = {n})")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("initial point must be strictly positive")]
    NonPositivePoint,
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("state must be strictly positive")]
    NonPositiveState,
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("rate constants must be strictly positive")]
    NonPositiveRate,
    #[error("end time must be positive")]
    NonPositiveEndTime,
    #[error("output times must be increasing and within (0, t_end]")]
    BadOutputTimes,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConjugacyError {
    #[error("species mismatch: original has {original:?}, target has {target:?}")]
    SpeciesMismatch { original: Vec<String>, target: Vec<String> },
    #[error("target network has no reactions")]
    EmptyTarget,
    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("scaling constants and coefficients must be strictly positive")]
    NonPositive,
    #[error("permutation search is limited to at most 6 species (got {0})")]
    TooManySpecies(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("{found} complexes exceed the limit of {limit}")]
    TooManyComplexes { found: usize, limit: usize },
    #[error("at least two complexes are needed, got {0}")]
    TooFewComplexes(usize),
    #[error(transparent)]
    Conjugacy(#[from] ConjugacyError),
}
