//! Three-valued truth with Kleene connectives.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum Truth {
    Yes,
    No,
    Unknown,
}

impl Truth {
    pub fn from_bool(b: bool) -> Truth {
        if b {
            Truth::Yes
        } else {
            Truth::No
        }
    }

    pub fn is_yes(self) -> bool {
        self == Truth::Yes
    }

    pub fn is_no(self) -> bool {
        self == Truth::No
    }

    pub fn is_decisive(self) -> bool {
        self != Truth::Unknown
    }

    pub fn and(self, o: Truth) -> Truth {
        match (self, o) {
            (Truth::No, _) | (_, Truth::No) => Truth::No,
            (Truth::Yes, Truth::Yes) => Truth::Yes,
            _ => Truth::Unknown,
        }
    }

    pub fn or(self, o: Truth) -> Truth {
        match (self, o) {
            (Truth::Yes, _) | (_, Truth::Yes) => Truth::Yes,
            (Truth::No, Truth::No) => Truth::No,
            _ => Truth::Unknown,
        }
    }

    pub fn all<I: IntoIterator<Item = Truth>>(it: I) -> Truth {
        it.into_iter().fold(Truth::Yes, Truth::and)
    }

    pub fn any<I: IntoIterator<Item = Truth>>(it: I) -> Truth {
        it.into_iter().fold(Truth::No, Truth::or)
    }

    /// True when `self` refines `coarser` (equal, or `coarser` is Unknown).
    pub fn refines(self, coarser: Truth) -> bool {
        coarser == Truth::Unknown || self == coarser
    }
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Truth::Yes => "yes",
            Truth::No => "no",
            Truth::Unknown => "unknown",
        })
    }
}

/// A truth value together with the rule that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub value: Truth,
    pub provenance: String,
}

impl Verdict {
    pub fn new(value: Truth, provenance: impl Into<String>) -> Self {
        let provenance = provenance.into();
        debug_assert!(!provenance.is_empty());
        Verdict { value, provenance }
    }

    pub fn yes(p: impl Into<String>) -> Self {
        Self::new(Truth::Yes, p)
    }

    pub fn no(p: impl Into<String>) -> Self {
        Self::new(Truth::No, p)
    }

    pub fn unknown(p: impl Into<String>) -> Self {
        Self::new(Truth::Unknown, p)
    }
}

impl std::ops::Not for Truth {
    type Output = Truth;

    fn not(self) -> Truth {
        match self {
            Truth::Yes => Truth::No,
            Truth::No => Truth::Yes,
            Truth::Unknown => Truth::Unknown,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Truth::*;

    #[test]
    fn kleene_tables() {
        assert_eq!(No.and(Unknown), No);
        assert_eq!(Yes.and(Unknown), Unknown);
        assert_eq!(Yes.or(Unknown), Yes);
        assert_eq!(No.or(Unknown), Unknown);
        assert_eq!(!Unknown, Unknown);
        assert_eq!(Truth::all([]), Yes);
        assert_eq!(Truth::any([]), No);
    }
}
