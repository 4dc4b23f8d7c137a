use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable {0} has more than one rule")]
    DuplicateLhs(String),
    #[error("variable {0} is used but has no rule")]
    MissingRule(String),
    #[error("rules are cyclic through variable {0}")]
    CyclicDependency(String),
    #[error("unknown symbol {0}")]
    UnknownSymbol(String),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("position out of range: {0}")]
    OutOfRange(String),
    #[error("word of length {len} exceeds the decompression cap {cap}")]
    CapExceeded { len: String, cap: usize },
    #[error("length arithmetic overflowed the length type")]
    LengthOverflow,
    #[error("malformed interval question: {0}")]
    MalformedQuestion(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("alphabet has self-inverse letter {0}; a group alphabet is required")]
    NonGroupAlphabet(String),
    #[error("unknown endomorphism {0}")]
    UnknownEndomorphism(String),
    #[error("unknown letter {0}")]
    UnknownLetter(String),
    #[error("no value assigned to variable {0}")]
    MissingAssignment(String),
    #[error("assignment is not a solution: {0}")]
    NotASolution(String),
    #[error("substitution is not compatible with the involution at letter {0}")]
    InvolutionMismatch(String),
    #[error("word is not reduced: {0}")]
    NotReduced(String),
    #[error("empty input")]
    EmptyInput,
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
