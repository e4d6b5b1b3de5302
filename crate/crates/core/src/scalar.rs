//! Scalar abstraction for the approximate estimators.
//!
//! Orientation loads are integral; the slack `eta`, the accuracy parameter and
//! all density estimates live in a floating point type chosen by the caller.
//! Exact oracle densities use [`ExactDensity`] instead.

use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type usable for slack, accuracy and density estimates.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to every Scalar")
    }

    fn of_u64(x: u64) -> Self {
        Self::from_u64(x).expect("u64 converts to every Scalar")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Exact edges-per-vertex density: total weight over vertex count.
pub type ExactDensity = Ratio<u64>;

/// Base-2 logarithm clamped below at 1, so `log n` never vanishes on tiny
/// vertex universes.
pub fn log2_clamped<F: Scalar>(x: u64) -> F {
    if x < 2 {
        F::one()
    } else {
        F::of_u64(x).log2().max(F::one())
    }
}

pub fn ratio_to<F: Scalar>(r: &ExactDensity) -> F {
    F::of_u64(*r.numer()) / F::of_u64(*r.denom())
}
