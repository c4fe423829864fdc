use core::cmp::Ordering;
use core::fmt;

use super::{Rational, TheoryError};

/// Largest exponent a [`Dyadic`] may carry. Keeps every measure built from
/// dyadic endpoints inside `i128` with room for the factor 3 of the tail
/// series.
pub const MAX_EXPONENT: u32 = 100;

/// A dyadic rational `numerator / 2^exponent` in `[0, 1]`, stored in
/// canonical form (odd numerator, or `0 / 2^0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: u128,
    exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    pub fn new(mut num: u128, mut exp: u32) -> Result<Self, TheoryError> {
        if num == 0 {
            return Ok(Self::ZERO);
        }
        let shift = num.trailing_zeros().min(exp);
        num >>= shift;
        exp -= shift;
        if exp > MAX_EXPONENT {
            return Err(TheoryError::ExponentTooLarge(exp));
        }
        if num > 1u128 << exp {
            return Err(TheoryError::OutOfDomain);
        }
        Ok(Self { num, exp })
    }

    /// `2^{-n}`.
    pub fn pow2_neg(n: u32) -> Result<Self, TheoryError> {
        Self::new(1, n)
    }

    pub fn numerator(&self) -> u128 {
        self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(self.num as i128, 1i128 << self.exp)
    }

    /// The `n` with `2^{-n-1} < self ≤ 2^{-n}`, or `None` for zero.
    pub fn e_index(&self) -> Option<u32> {
        if self.num == 0 {
            return None;
        }
        let high = 127 - self.num.leading_zeros();
        Some(if self.num.is_power_of_two() { self.exp } else { self.exp - high - 1 })
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exp.max(other.exp);
        (self.num << (e - self.exp)).cmp(&(other.num << (e - other.exp)))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Dyadic> for Rational {
    fn from(d: Dyadic) -> Rational {
        d.to_rational()
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}
