//! Scalar abstraction for the simulator math.
//!
//! Everything on the signal path (geometry, propagation, fading, filtering)
//! is generic over [`Float`] so the same code runs in `f32` or `f64`.
//! Event times and KPI accounting are always `f64`; see the crate docs.

use rand::Rng;
use rand_distr::StandardNormal;

/// Floating-point scalar: `f32` or `f64`.
pub trait Float:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + core::ops::AddAssign
    + core::ops::SubAssign
    + core::ops::MulAssign
    + core::ops::DivAssign
    + core::fmt::Debug
    + core::fmt::Display
    + core::iter::Sum
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` constant.
    fn of(x: f64) -> Self;

    /// Widen to `f64` for event accounting and reporting.
    fn as_f64(self) -> f64;

    /// Uniform sample from `[0, 1)`.
    fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Standard normal sample.
    fn sample_standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

macro_rules! impl_float {
    ($t:ty) => {
        impl Float for $t {
            #[inline(always)]
            fn of(x: f64) -> Self {
                x as $t
            }

            #[inline(always)]
            fn as_f64(self) -> f64 {
                self as f64
            }

            #[inline(always)]
            fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
                rng.random::<$t>()
            }

            #[inline(always)]
            fn sample_standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                rng.sample(StandardNormal)
            }
        }
    };
}

impl_float!(f32);
impl_float!(f64);

/// Convert a power ratio in dB to linear scale.
#[inline]
pub fn db_to_linear<F: Float>(db: F) -> F {
    F::of(10.0).powf(db / F::of(10.0))
}

/// Convert a linear power ratio to dB.
#[inline]
pub fn linear_to_db<F: Float>(lin: F) -> F {
    F::of(10.0) * lin.log10()
}
