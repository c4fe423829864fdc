use alloc::vec::Vec;
use core::fmt;

use super::{Dyadic, Rational, TheoryError};

/// A `{0,1}`-valued step function on `(0, 1]` with half-open pieces.
///
/// `values[0]` holds on `(b_1, 1]`, `values[j]` on `(b_{j+1}, b_j]` and the
/// last value on `(0, b_last]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StepFunction {
    breakpoints: Vec<Dyadic>,
    values: Vec<bool>,
}

impl StepFunction {
    pub fn new(breakpoints: Vec<Dyadic>, values: Vec<bool>) -> Result<Self, TheoryError> {
        if values.len() != breakpoints.len() + 1 {
            return Err(TheoryError::ValueCount { breakpoints: breakpoints.len(), values: values.len() });
        }
        if breakpoints.iter().any(|b| b.is_zero() || *b == Dyadic::ONE) {
            return Err(TheoryError::Breakpoints("breakpoints must lie in (0, 1)"));
        }
        if breakpoints.windows(2).any(|w| w[0] <= w[1]) {
            return Err(TheoryError::Breakpoints("breakpoints must be strictly decreasing"));
        }
        Ok(Self { breakpoints, values })
    }

    pub fn constant(value: bool) -> Self {
        Self { breakpoints: Vec::new(), values: alloc::vec![value] }
    }

    /// Alternating values starting from `top` on the highest piece, so every
    /// breakpoint is a jump.
    pub fn alternating(breakpoints: Vec<Dyadic>, top: bool) -> Result<Self, TheoryError> {
        let values = (0..=breakpoints.len()).map(|j| top ^ (j % 2 == 1)).collect();
        Self::new(breakpoints, values)
    }

    pub fn breakpoints(&self) -> &[Dyadic] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn discontinuities(&self) -> usize {
        self.values.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Value at `x ∈ (0, 1]`.
    pub fn eval(&self, x: &Rational) -> Result<bool, TheoryError> {
        if *x <= Rational::from_integer(0) || *x > Rational::from_integer(1) {
            return Err(TheoryError::OutOfDomain);
        }
        Ok(self.values[self.breakpoints.iter().take_while(|b| *x <= b.to_rational()).count()])
    }

    /// The same function with equal neighbouring pieces merged.
    pub fn coalesced(&self) -> Self {
        let mut breakpoints = Vec::new();
        let mut values = alloc::vec![self.values[0]];
        for (b, &v) in self.breakpoints.iter().zip(&self.values[1..]) {
            if v != *values.last().unwrap_or(&v) {
                breakpoints.push(*b);
                values.push(v);
            }
        }
        Self { breakpoints, values }
    }

    /// Pieces as `(low, high, value)` from the top down.
    pub fn pieces(&self) -> impl Iterator<Item = (Dyadic, Dyadic, bool)> + '_ {
        let highs = core::iter::once(Dyadic::ONE).chain(self.breakpoints.iter().copied());
        let lows = self.breakpoints.iter().copied().chain(core::iter::once(Dyadic::ZERO));
        highs.zip(lows).zip(self.values.iter().copied()).map(|((h, l), v)| (l, h, v))
    }
}

impl fmt::Display for StepFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (lo, hi, v)) in self.pieces().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "({lo}, {hi}]:{}", u8::from(v))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn d(n: u128, e: u32) -> Dyadic {
        Dyadic::new(n, e).unwrap()
    }

    #[test]
    fn validation() {
        assert!(StepFunction::new(vec![d(1, 1)], vec![true]).is_err());
        assert!(StepFunction::new(vec![d(1, 2), d(1, 1)], vec![true, false, true]).is_err());
        assert!(StepFunction::new(vec![Dyadic::ONE], vec![true, false]).is_err());
        assert!(StepFunction::new(vec![d(3, 2), d(1, 1)], vec![true, false, true]).is_ok());
    }

    #[test]
    fn evaluation_is_right_closed() {
        let g = StepFunction::new(vec![d(1, 1)], vec![true, false]).unwrap();
        assert!(g.eval(&Rational::new(1, 1)).unwrap());
        assert!(!g.eval(&Rational::new(1, 2)).unwrap());
        assert!(g.eval(&Rational::new(513, 1024)).unwrap());
        assert!(g.eval(&Rational::new(0, 1)).is_err());
    }

    #[test]
    fn coalescing_drops_non_jumps() {
        let g = StepFunction::new(vec![d(3, 2), d(1, 1), d(1, 2)], vec![true, true, false, false]).unwrap();
        assert_eq!(g.discontinuities(), 1);
        let c = g.coalesced();
        assert_eq!(c.breakpoints(), &[d(1, 1)]);
        assert_eq!(c.values(), &[true, false]);
        assert_eq!(c.to_string(), "(1/2^1, 1]:1 (0, 1/2^1]:0");
    }
}
