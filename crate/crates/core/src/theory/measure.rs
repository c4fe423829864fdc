use alloc::string::String;
use alloc::vec::Vec;

use super::{Dyadic, Rational, StepFunction, TheoryError};

fn pow2_neg(n: u32) -> Rational {
    Rational::new(1, 1i128 << n)
}

/// The target `f`: 1 on `E_n = (2^{-n-1}, 2^{-n}]` for even `n`, 0 for odd.
pub fn target_value(x: impl Into<Rational>) -> Result<bool, TheoryError> {
    let mut x = x.into();
    let one = Rational::from_integer(1);
    let half = Rational::new(1, 2);
    if x <= Rational::from_integer(0) || x > one {
        return Err(TheoryError::OutOfDomain);
    }
    let mut n = 0u32;
    while x <= half {
        x *= Rational::from_integer(2);
        n += 1;
    }
    Ok(n.is_multiple_of(2))
}

/// `μ({f = 1} ∩ (0, 2^{-m}])`: `(2/3)·2^{-m}` for even `m`, `(1/3)·2^{-m}`
/// for odd `m`.
pub fn tail_ones(m: u32) -> Rational {
    let share = if m.is_multiple_of(2) { Rational::new(2, 3) } else { Rational::new(1, 3) };
    share * pow2_neg(m)
}

/// `μ({f = 1} ∩ (0, x])`.
fn ones_below(x: Dyadic) -> Rational {
    let Some(n) = x.e_index() else {
        return Rational::from_integer(0);
    };
    let base = tail_ones(n + 1);
    if n % 2 == 0 {
        base + x.to_rational() - pow2_neg(n + 1)
    } else {
        base
    }
}

/// `μ({f = value} ∩ (0, beta])`.
pub fn tail_measure(value: bool, beta: Dyadic) -> Rational {
    let ones = ones_below(beta);
    if value {
        ones
    } else {
        beta.to_rational() - ones
    }
}

/// `μ({x ∈ (0, 1] : f(x) = g(x)})`.
pub fn agreement_measure(g: &StepFunction) -> Rational {
    g.pieces()
        .map(|(lo, hi, v)| tail_measure(v, hi) - tail_measure(v, lo))
        .fold(Rational::from_integer(0), |a, b| a + b)
}

/// Decimal expansion of a nonnegative rational rounded half-up to `digits`
/// fractional digits.
pub fn decimal(r: &Rational, digits: usize) -> String {
    let (n, d) = (*r.numer(), *r.denom());
    let mut int = n / d;
    let mut rem = n % d;
    let mut frac = Vec::with_capacity(digits);
    for _ in 0..digits {
        rem *= 10;
        frac.push((rem / d) as u8);
        rem %= d;
    }
    if 2 * rem >= d {
        let mut carry = true;
        for digit in frac.iter_mut().rev() {
            if !carry {
                break;
            }
            *digit = (*digit + 1) % 10;
            carry = *digit == 0;
        }
        if carry {
            int += 1;
        }
    }
    let mut out = alloc::format!("{int}");
    if digits > 0 {
        out.push('.');
        out.extend(frac.into_iter().map(|c| char::from(b'0' + c)));
    }
    out
}
