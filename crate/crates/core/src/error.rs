use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// The CLI maps [`Error::Budget`] to exit status 1 and everything else to 2.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("unknown variable `{name}` at byte {pos}")]
    UnknownVariable { name: String, pos: usize },

    #[error("modulus mismatch: expected {expected}, found {found}")]
    ModulusMismatch { expected: u64, found: u64 },

    #[error("jet order {order} exceeds truncation depth {depth}")]
    JetOrder { order: u32, depth: u32 },

    #[error("work budget exceeded: {required} steps required, {allowed} allowed")]
    Budget { required: String, allowed: u64 },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("definition file line {line}: {msg}")]
    Definition { line: usize, msg: String },

    #[error("refused: {0}")]
    Refused(String),

    #[error("insufficient coverage: {0}")]
    Coverage(String),
}

impl Error {
    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            pos,
            msg: msg.into(),
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
