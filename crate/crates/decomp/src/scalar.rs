use std::fmt::Debug;

use num_traits::Float;

/// Floating-point scalar the closed-form layer is generic over.
///
/// Blanket-implemented for `f32` and `f64`. The crate-root aliases fix `f64`,
/// which is what the CLI and the simulator use throughout.
pub trait Scalar: Float + Debug + 'static {}

impl<T> Scalar for T where T: Float + Debug + 'static {}

/// Casts an `f64` constant into the working scalar type.
///
/// Infallible for the types `Scalar` admits: `Float` implies `NumCast`, and
/// every finite `f64` converts (possibly with rounding) into `f32`/`f64`.
pub(crate) fn cast<S: Scalar>(x: f64) -> S {
    S::from(x).expect("f64 constant converts into any Scalar")
}

/// Casts an integer count into the working scalar type.
pub(crate) fn cast_u64<S: Scalar>(n: u64) -> S {
    // u64 -> f64 is total (rounds above 2^53), and f64 -> S is total.
    cast(n as f64)
}

/// Widens a scalar back to `f64` for error reporting.
pub(crate) fn as_f64<S: Scalar>(x: S) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
