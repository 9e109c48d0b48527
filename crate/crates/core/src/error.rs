use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// A query reached past what a finite prefix knows.
    #[error("prefix only known below {bound}, queried {n}")]
    InsufficientKnowledge { n: u64, bound: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("ratio undefined: reference set is empty on [0, {0}]")]
    UndefinedRatio(u64),
    /// A stream ran past its consumption budget without producing the answer.
    /// This is never a wrong answer, only a missing one.
    #[error("consumption budget of {0} exhausted")]
    BudgetExceeded(u64),
    #[error("{0} was enumerated into both sides of the pair")]
    Contradiction(u64),
    #[error("not a function: {arg} maps to both {first} and {second}")]
    NotAFunction { arg: u64, first: u64, second: u64 },
    #[error("format error: {0}")]
    Format(String),
    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
