use alloc::string::String;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A value does not belong to the structure it was used with.
    Domain(String),
    /// Input that should satisfy an axiom system does not.
    Axiom(String),
    /// An operation was called outside its precondition.
    Precondition(String),
    /// Inputs that must agree (tracts, ground sets, supports) do not.
    Mismatch(String),
    /// The computation would exceed the enumeration limits.
    Size(String),
    /// Malformed descriptor or literal.
    Parse(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Axiom(m) => write!(f, "axiom violation: {m}"),
            Error::Precondition(m) => write!(f, "precondition failed: {m}"),
            Error::Mismatch(m) => write!(f, "mismatch: {m}"),
            Error::Size(m) => write!(f, "size limit: {m}"),
            Error::Parse(m) => write!(f, "parse error: {m}"),
        }
    }
}

impl core::error::Error for Error {}

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::Error::$kind(alloc::format!($($arg)*)))
    };
}
pub(crate) use bail;
