//! Exact scalars and Koszul signs.

use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::ops::Mul;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::Signed;

/// An exact field element.
///
/// Only reduced rationals implement this; there is deliberately no impl for
/// floating point types.
pub trait Scalar: Clone + Ord + Hash + Debug + Display + Signed + Send + Sync + 'static {
    /// `num / den`, reduced. Panics on a zero denominator.
    fn frac(num: i64, den: i64) -> Self;

    fn int(n: i64) -> Self {
        Self::frac(n, 1)
    }

    /// `1 / k!`
    fn inv_factorial(k: usize) -> Self {
        let mut f = Self::one();
        for i in 2..=k {
            f = f * Self::int(i as i64);
        }
        Self::one() / f
    }

    /// Numerator and denominator as decimal strings, denominator positive.
    fn parts(&self) -> (String, String);
}

impl Scalar for Ratio<BigInt> {
    fn frac(num: i64, den: i64) -> Self {
        Ratio::new(BigInt::from(num), BigInt::from(den))
    }

    fn parts(&self) -> (String, String) {
        (self.numer().to_string(), self.denom().to_string())
    }
}

impl Scalar for Ratio<i64> {
    fn frac(num: i64, den: i64) -> Self {
        Ratio::new(num, den)
    }

    fn parts(&self) -> (String, String) {
        (self.numer().to_string(), self.denom().to_string())
    }
}

/// Render a scalar as `p/q` (always with a denominator).
pub fn fmt_scalar<S: Scalar>(c: &S) -> String {
    let (n, d) = c.parts();
    format!("{n}/{d}")
}

/// A sign `±1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Sign(bool);

impl Sign {
    pub const PLUS: Sign = Sign(false);
    pub const MINUS: Sign = Sign(true);

    pub fn from_odd(odd: bool) -> Self {
        Sign(odd)
    }

    /// `(-1)^n`
    pub fn pow(n: i64) -> Self {
        Sign(n.rem_euclid(2) == 1)
    }

    /// `(-1)^(a*b)`
    pub fn koszul(a: i64, b: i64) -> Self {
        Sign(a.rem_euclid(2) == 1 && b.rem_euclid(2) == 1)
    }

    pub fn is_minus(self) -> bool {
        self.0
    }

    pub fn apply<S: Scalar>(self, c: S) -> S {
        if self.0 {
            -c
        } else {
            c
        }
    }

    pub fn to_scalar<S: Scalar>(self) -> S {
        self.apply(S::one())
    }
}

impl Mul for Sign {
    type Output = Sign;
    // the flag records oddness, so products add mod 2
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Sign) -> Sign {
        Sign(self.0 ^ rhs.0)
    }
}

impl Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.0 { "-1" } else { "+1" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Q, Q64};

    #[test]
    fn inverse_factorials() {
        assert_eq!(Q::inv_factorial(0), Q::int(1));
        assert_eq!(Q::inv_factorial(3), Q::frac(1, 6));
        assert_eq!(Q64::inv_factorial(4), Q64::frac(1, 24));
    }

    #[test]
    fn fractions_are_reduced() {
        let c = Q::frac(6, -4);
        assert_eq!(c.parts(), ("-3".to_string(), "2".to_string()));
        assert_eq!(fmt_scalar(&Q::int(2)), "2/1");
    }

    #[test]
    fn sign_algebra() {
        assert_eq!(Sign::pow(-3), Sign::MINUS);
        assert_eq!(Sign::koszul(1, -1), Sign::MINUS);
        assert_eq!(Sign::koszul(2, 1), Sign::PLUS);
        assert_eq!(Sign::MINUS * Sign::MINUS, Sign::PLUS);
        assert_eq!(Sign::MINUS.apply(Q::int(3)), Q::int(-3));
    }
}
