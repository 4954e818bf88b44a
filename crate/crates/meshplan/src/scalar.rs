//! Scalar abstraction for solver arithmetic.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar the solver and model builders are generic over.
///
/// Implemented by `f32` and `f64` through the blanket impl. The crate-root
/// aliases fix `f64`, which is what the benchmark pipeline uses; `f32` is
/// adequate for small models and halves the tableau footprint.
pub trait Scalar:
    Float + NumAssign + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float
        + NumAssign
        + FromPrimitive
        + ToPrimitive
        + Sum
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}
