use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar the geometry and weight code is generic over.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Relative comparison tolerance used by the "exact" predicates.
    fn rel_tol() -> Self;

    /// Lossy conversion from `f64`; every literal we use is representable.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal fits the scalar type")
    }
}

impl Scalar for f64 {
    #[inline]
    fn rel_tol() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    #[inline]
    fn rel_tol() -> Self {
        1e-5
    }
}
