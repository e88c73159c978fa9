//! Scalar abstraction shared by the closed-form parts of the crate.
//!
//! Operator algebra, the Bethe-equation residuals and all the analytic
//! formulas are written against [`Real`], so they run in `f32` or `f64`.
//! Iterative solvers and dense diagonalization are `f64` only.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar usable by the generic parts of the crate.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("finite float")
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + NumAssign
        + Sum
        + Debug
        + Display
        + LowerExp
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Machine-precision-scaled tolerance: `tol64` for `f64`, a proportionally
/// looser value for lower-precision types.
#[inline]
pub fn scaled_tol<T: Real>(tol64: f64) -> T {
    let ratio = T::epsilon().to_f64_lossy() / f64::EPSILON;
    T::lit(tol64 * ratio)
}
