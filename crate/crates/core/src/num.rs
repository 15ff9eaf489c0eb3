//! Scalar abstraction for the numeric core.
//!
//! Metric and scoring functions are generic over [`Scalar`] so they work at
//! `f32` or `f64`; the pipeline itself instantiates them at [`crate::Score`].

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum<Self> + Debug + Display + Send + Sync
{
    /// Lossless-enough conversion from a count.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count fits in scalar")
    }
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + NumAssign + Sum<T> + Debug + Display + Send + Sync
{
}
