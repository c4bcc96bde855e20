use nalgebra::RealField;
use num_traits::FromPrimitive;

/// Scalar type the numeric kernels are generic over.
///
/// `f64` is the working type for every shipped pipeline; `f32` satisfies the
/// same bounds for cheap experimentation. Tolerance-sensitive guarantees
/// (the documented 1e-9 .. 1e-12 agreement bounds) hold at double precision.
pub trait Real: RealField + FromPrimitive + Copy {}

impl<T: RealField + FromPrimitive + Copy> Real for T {}

/// Lift an `f64` constant into the working scalar type.
#[inline]
pub fn real<S: Real>(x: f64) -> S {
    S::from_f64(x).expect("constant representable in scalar type")
}
