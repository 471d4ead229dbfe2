//! Scalar abstractions.
//!
//! Every payoff law in this crate is a polynomial in the server positions and
//! the failure probability, so the payoff engines only need field arithmetic
//! and an ordering. They are written against [`Scalar`], which is implemented
//! for `f32`, `f64` and the exact rationals `Ratio<i64>` / `Ratio<i128>`.
//!
//! Anything that needs square roots, bisection, random sampling or a notion of
//! "arbitrarily close" (constructors, Monte Carlo, best-response search) is
//! bounded on [`Real`] instead.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Ordered field element usable by the payoff engines.
pub trait Scalar:
    Num + Copy + PartialOrd + Debug + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Absolute tolerance for comparing two closed-form quantities of order one.
    /// Zero for exact types.
    fn formula_tol() -> Self;

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn half() -> Self {
        Self::one() / Self::two()
    }

    /// `num / den` built from integers, exact for rational types.
    fn ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num).expect("integer literal") / Self::from_i64(den).expect("integer literal")
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn abs_diff(self, other: Self) -> Self {
        if self > other {
            self - other
        } else {
            other - self
        }
    }

    /// Integer power by repeated multiplication (exact for rationals).
    fn powu(self, exp: usize) -> Self {
        (0..exp).fold(Self::one(), |acc, _| acc * self)
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn formula_tol() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn formula_tol() -> Self {
        1e-5
    }
}

impl Scalar for Ratio<i64> {
    fn formula_tol() -> Self {
        Ratio::from_integer(0)
    }
}

impl Scalar for Ratio<i128> {
    fn formula_tol() -> Self {
        Ratio::from_integer(0)
    }
}

/// Floating-point scalar for the numerical layers.
pub trait Real: Scalar + Float {
    /// Default strict-improvement threshold for equilibrium checks.
    fn nash_delta() -> Self;

    /// Offset used to place a deviator next to an already paired coordinate,
    /// relative to a unit-length segment.
    fn approach_gap() -> Self;
}

impl Real for f64 {
    fn nash_delta() -> Self {
        1e-9
    }

    fn approach_gap() -> Self {
        1e-12
    }
}

impl Real for f32 {
    fn nash_delta() -> Self {
        1e-4
    }

    fn approach_gap() -> Self {
        1e-6
    }
}

/// Exact comparison helper: `|lhs - rhs| <= tol`.
pub fn close<T: Scalar>(lhs: T, rhs: T, tol: T) -> bool {
    lhs.abs_diff(rhs) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_literals_are_exact() {
        let third: Ratio<i128> = Scalar::ratio(1, 3);
        assert_eq!(third * Ratio::from_integer(3), Ratio::from_integer(1));
        assert_eq!(<Ratio<i64> as Scalar>::half(), Ratio::new(1, 2));
    }

    #[test]
    fn powu_matches_float_pow() {
        assert_eq!(0.5f64.powu(3), 0.125);
        assert_eq!(2.0f64.powu(0), 1.0);
    }
}
