//! Floating-point abstraction for the allocation math.

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Scalar type the allocation math is generic over. Implemented for `f32`
/// and `f64`; the simulator's default is `f64` (the tightest tolerances in
/// the test suite assume it).
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + core::iter::Sum
    + core::fmt::Debug
    + core::fmt::Display
    + Send
    + Sync
    + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Lossy conversion from `f64` literals into the working scalar.
#[inline]
pub fn fl<F: Scalar>(v: f64) -> F {
    F::from_f64(v).expect("f64 converts into any Scalar")
}

/// Exact-for-small-counts conversion from `usize`.
#[inline]
pub fn fl_usize<F: Scalar>(n: usize) -> F {
    F::from_usize(n).expect("usize converts into any Scalar")
}
