//! Scalar abstraction for the numeric core.

use std::fmt::{Debug, Display};

/// Floating-point scalar the geometry and solvers are generic over.
pub trait Real:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::NumAssign
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    fn pi() -> Self {
        Self::from_f64(std::f64::consts::PI).unwrap()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand for lifting an `f64` constant into the generic scalar.
#[inline]
pub fn c<T: Real>(x: f64) -> T {
    T::from_f64(x).unwrap()
}
