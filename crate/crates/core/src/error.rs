use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Malformed argument: out-of-range item, inconsistent allocation, bad ratio.
    InvalidInput(String),
    /// An exhaustive routine was asked to do more work than its configured bound.
    UnsupportedSize { what: &'static str, size: u128, limit: u128 },
    /// The instance is outside the function class an algorithm requires.
    WrongClass(String),
    /// A runtime invariant of an algorithm failed. Usually means a class declaration was false.
    InvariantViolation(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::UnsupportedSize { what, size, limit } => {
                write!(f, "unsupported size: {what} is {size}, limit is {limit}")
            }
            Error::WrongClass(msg) => write!(f, "wrong function class: {msg}"),
            Error::InvariantViolation(msg) => write!(f, "invariant violated: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

macro_rules! invalid {
    ($($arg:tt)*) => { $crate::Error::InvalidInput(alloc::format!($($arg)*)) };
}

macro_rules! invariant {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err($crate::Error::InvariantViolation(alloc::format!($($arg)*)));
        }
    };
}

pub(crate) use invalid;
pub(crate) use invariant;
