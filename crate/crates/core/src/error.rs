use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("empty alphabet")]
    EmptyAlphabet,
    #[error("alphabet of size {0} exceeds the supported maximum of {max}", max = crate::MAX_ALPHABET)]
    AlphabetTooLarge(usize),
    #[error("substitution images must be non-empty")]
    ZeroLength,
    #[error("unequal image lengths: letter {letter} has length {found}, expected {expected}")]
    UnequalImageLengths {
        letter: usize,
        expected: usize,
        found: usize,
    },
    #[error("letter {letter} is not in an alphabet of size {alphabet_size}")]
    InvalidLetter { letter: usize, alphabet_size: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("operation requires a binary alphabet (got size {0})")]
    NotBinary(usize),
    #[error("substitution is not bijective")]
    NotBijective,
    #[error("substitution is not primitive")]
    NotPrimitive,
    #[error("image of seed letter {0} does not start with itself")]
    NotSelfStarting(usize),
    #[error("size {requested} exceeds configured cap {cap}")]
    CapExceeded { requested: u128, cap: u128 },
    #[error("prefix length {prefix} must exceed the difference {difference}")]
    PrefixTooShort { prefix: u64, difference: u64 },
    #[error("outside the hypotheses of the closed form: {0}")]
    OutsideHypotheses(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("spec file: {0}")]
    SpecFile(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::SpecFile(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
