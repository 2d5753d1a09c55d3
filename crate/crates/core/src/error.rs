use alloc::string::String;
use core::fmt;

use crate::axis::Axis;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Anchor with `lower >= upper`.
    DegenerateAnchor(Axis),
    FamilyTooSmall {
        family: String,
        size: usize,
        min: usize,
    },
    InvalidBattery(String),
    /// An input outside the domain an operation is defined on.
    Domain(String),
    /// Not enough data to produce an estimate.
    Insufficient(String),
    /// Design matrix of a local fit stayed singular after widening.
    RankDeficient,
    Mismatch(String),
    MissingField(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DegenerateAnchor(axis) => {
                write!(f, "degenerate anchor on axis {}: lower >= upper", axis.letter())
            }
            Error::FamilyTooSmall { family, size, min } => {
                write!(f, "family too small: `{family}` has {size} tasks, minimum is {min}")
            }
            Error::InvalidBattery(msg) => write!(f, "invalid battery: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Insufficient(msg) => write!(f, "insufficient data: {msg}"),
            Error::RankDeficient => f.write_str("local fit is rank-deficient after widening"),
            Error::Mismatch(msg) => write!(f, "mismatch: {msg}"),
            Error::MissingField(name) => write!(f, "missing config field `{name}`"),
        }
    }
}

impl core::error::Error for Error {}

macro_rules! domain {
    ($($arg:tt)*) => { $crate::error::Error::Domain(alloc::format!($($arg)*)) };
}
pub(crate) use domain;
