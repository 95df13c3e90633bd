//! The hash function: trits select a non-backtracking walk on the Cayley
//! graph of `SL_n(F_p)` with respect to `{A^±1, B^±1}`, and the digest is the
//! product of the step matrices.

mod digest;
mod encode;
mod table;
mod walk;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use digest::Digest;
pub use encode::{encode_bytes, TRITS_PER_BYTE};
pub use table::AttributionTable;
pub use walk::{hash_bytes, hash_trits, hash_trits_from_row, step_sequence, Hasher, WalkState};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HashError {
    #[error("invalid trit {0}: expected 1, 2 or 3")]
    InvalidTrit(u8),
    #[error("invalid attribution table: {0}")]
    InvalidTable(String),
    #[error("unknown step `{0}`")]
    UnknownStep(String),
    #[error("malformed digest: {0}")]
    MalformedDigest(String),
}

/// One of the four step matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    A,
    B,
    AInv,
    BInv,
}

impl Step {
    pub const ALL: [Step; 4] = [Step::A, Step::B, Step::AInv, Step::BInv];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub fn from_index(i: usize) -> Step {
        Self::ALL[i]
    }

    #[inline]
    pub fn inverse(self) -> Step {
        Self::ALL[(self.index() + 2) % 4]
    }

    /// True for `A` and `A^-1`.
    pub fn is_a(self) -> bool {
        matches!(self, Step::A | Step::AInv)
    }

    /// `+1` or `-1`.
    pub fn exponent(self) -> i64 {
        match self {
            Step::A | Step::B => 1,
            Step::AInv | Step::BInv => -1,
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Step::A => "A",
            Step::B => "B",
            Step::AInv => "A^-1",
            Step::BInv => "B^-1",
        })
    }
}

impl FromStr for Step {
    type Err = HashError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" => Ok(Step::A),
            "B" => Ok(Step::B),
            "A^-1" | "A-" | "Ainv" | "a" => Ok(Step::AInv),
            "B^-1" | "B-" | "Binv" | "b" => Ok(Step::BInv),
            other => Err(HashError::UnknownStep(other.to_string())),
        }
    }
}

/// Renders a step word compactly, e.g. `BBaBB` (lowercase = inverse).
pub fn format_word(steps: &[Step]) -> String {
    steps
        .iter()
        .map(|s| match s {
            Step::A => 'A',
            Step::B => 'B',
            Step::AInv => 'a',
            Step::BInv => 'b',
        })
        .collect()
}

/// Parses trit literals such as `"1321321323"`.
pub fn parse_trits(text: &str) -> Result<Vec<u8>, HashError> {
    text.trim()
        .bytes()
        .map(|c| match c {
            b'1'..=b'3' => Ok(c - b'0'),
            other => Err(HashError::InvalidTrit(other.wrapping_sub(b'0'))),
        })
        .collect()
}
