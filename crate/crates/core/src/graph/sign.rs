use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Side of a single affine coordinate: `l ≥ 0` or `l < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    NonNeg,
    Neg,
}

impl Sign {
    pub fn of(v: f64) -> Self {
        if v >= 0.0 {
            Sign::NonNeg
        } else {
            Sign::Neg
        }
    }

    pub fn is_nonneg(self) -> bool {
        self == Sign::NonNeg
    }
}

/// Chamber key: one sign per output coordinate of a decider. Written as a
/// string of `+` and `-`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "String", into = "String"))]
pub struct SignPattern(Vec<Sign>);

impl SignPattern {
    pub fn new(signs: Vec<Sign>) -> Self {
        Self(signs)
    }

    pub fn of_values(values: &[f64]) -> Self {
        Self(values.iter().copied().map(Sign::of).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn signs(&self) -> &[Sign] {
        &self.0
    }

    /// `true` at coordinates that survive a ReLU.
    pub fn relu_mask(&self) -> Vec<bool> {
        self.0.iter().map(|s| s.is_nonneg()).collect()
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(if s.is_nonneg() { "+" } else { "-" })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid sign character {0:?}, expected '+' or '-'")]
pub struct ParseSignError(char);

impl FromStr for SignPattern {
    type Err = ParseSignError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '+' => Ok(Sign::NonNeg),
                '-' => Ok(Sign::Neg),
                other => Err(ParseSignError(other)),
            })
            .collect::<Result<_, _>>()
            .map(SignPattern)
    }
}

impl TryFrom<String> for SignPattern {
    type Error = ParseSignError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<SignPattern> for String {
    fn from(p: SignPattern) -> Self {
        alloc::format!("{p}")
    }
}
