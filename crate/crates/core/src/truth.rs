//! Strong Kleene three-valued truth.

use std::fmt;
use std::ops::{BitAnd, BitOr, Not};
use std::str::FromStr;

use crate::error::Error;

/// A Kleene truth value. `Unknown` is the "not yet decided" value that
/// model expansion may later refine to either definite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Truth3 {
    False,
    Unknown,
    True,
}

impl Truth3 {
    pub const ALL: [Truth3; 3] = [Truth3::True, Truth3::False, Truth3::Unknown];

    pub fn from_bool(b: bool) -> Self {
        if b {
            Truth3::True
        } else {
            Truth3::False
        }
    }

    pub fn is_definite(self) -> bool {
        self != Truth3::Unknown
    }

    pub fn to_bool(self) -> Option<bool> {
        match self {
            Truth3::True => Some(true),
            Truth3::False => Some(false),
            Truth3::Unknown => None,
        }
    }

    pub fn and(self, other: Truth3) -> Truth3 {
        self.min(other)
    }

    pub fn or(self, other: Truth3) -> Truth3 {
        self.max(other)
    }

    pub fn implies(self, other: Truth3) -> Truth3 {
        (!self).or(other)
    }

    /// `self` refines to `other` when it is unknown or already equal.
    pub fn refines_to(self, other: Truth3) -> bool {
        self == Truth3::Unknown || self == other
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Truth3::True => "true",
            Truth3::False => "false",
            Truth3::Unknown => "unknown",
        }
    }
}

impl Not for Truth3 {
    type Output = Truth3;

    fn not(self) -> Truth3 {
        match self {
            Truth3::True => Truth3::False,
            Truth3::False => Truth3::True,
            Truth3::Unknown => Truth3::Unknown,
        }
    }
}

impl BitAnd for Truth3 {
    type Output = Truth3;

    fn bitand(self, rhs: Truth3) -> Truth3 {
        self.and(rhs)
    }
}

impl BitOr for Truth3 {
    type Output = Truth3;

    fn bitor(self, rhs: Truth3) -> Truth3 {
        self.or(rhs)
    }
}

impl From<bool> for Truth3 {
    fn from(b: bool) -> Self {
        Truth3::from_bool(b)
    }
}

impl fmt::Display for Truth3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Truth3 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "true" | "T" => Ok(Truth3::True),
            "false" | "F" => Ok(Truth3::False),
            "unknown" | "?" => Ok(Truth3::Unknown),
            other => Err(Error::Command(format!(
                "expected true, false or unknown, found `{other}`"
            ))),
        }
    }
}
