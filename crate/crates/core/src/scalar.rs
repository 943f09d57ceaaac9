//! Scalar abstraction shared by every numerical module.
//!
//! Everything in the crate is written against [`Real`], so the same code runs
//! in `f64` (the default, and the only precision the tight tolerances are
//! calibrated for) and in `f32` for quick exploratory work.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type usable by the solvers, the MD engine and the estimators.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + FromStr
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Accepted deviation of a probability vector's sum from one.
    const NORMALIZATION_TOL: Self;
    /// Default absolute residual for the constraint solvers.
    const SOLVER_TOL: Self;
    /// Human readable type name, written into file headers.
    const NAME: &'static str;

    /// Converts an `f64` literal. Never fails for the supported types.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Real for f64 {
    const NORMALIZATION_TOL: Self = 1e-12;
    const SOLVER_TOL: Self = 1e-10;
    const NAME: &'static str = "f64";
}

impl Real for f32 {
    const NORMALIZATION_TOL: Self = 1e-5;
    const SOLVER_TOL: Self = 1e-4;
    const NAME: &'static str = "f32";
}

/// `ln Σ exp(x)` with the usual max shift. Empty or all `-inf` input gives `-inf`.
pub fn log_sum_exp<T: Real>(xs: impl IntoIterator<Item = T> + Clone) -> T {
    let max = xs
        .clone()
        .into_iter()
        .fold(T::neg_infinity(), |m, x| if x > m { x } else { m });
    if max == T::neg_infinity() {
        return max;
    }
    let s: T = xs.into_iter().map(|x| (x - max).exp()).sum();
    max + s.ln()
}
