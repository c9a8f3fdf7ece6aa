//! Scalar abstraction for the numeric core.
//!
//! Everything downstream is written against [`Real`] so the same formulas
//! instantiate at `f32` and `f64`. The documented tolerances assume `f64`.

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar with the constants and conversions the library needs.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + core::fmt::Debug
    + core::fmt::Display
    + core::fmt::LowerExp
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + NumAssign
        + core::fmt::Debug
        + core::fmt::Display
        + core::fmt::LowerExp
        + Send
        + Sync
        + 'static
{
}

/// Lift an `f64` literal into the working scalar type.
#[inline]
pub fn rf<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("finite f64 must convert")
}

/// Lift a small integer into the working scalar type.
#[inline]
pub fn ri<T: Real>(n: i64) -> T {
    T::from_i64(n).expect("small integer must convert")
}

/// Lower the working scalar to `f64` (for reports and seeding).
#[inline]
pub fn lower<T: Real>(x: T) -> f64 {
    x.to_f64().expect("scalar must lower to f64")
}

/// Compensated (Kahan) accumulator.
#[derive(Clone, Copy, Debug)]
pub struct Kahan<T> {
    sum: T,
    carry: T,
}

impl<T: Real> Default for Kahan<T> {
    fn default() -> Self {
        Self {
            sum: T::zero(),
            carry: T::zero(),
        }
    }
}

impl<T: Real> Kahan<T> {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, term: T) {
        let y = term - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn total(&self) -> T {
        self.sum
    }
}

/// Squared Euclidean distance between points given as coordinate slices.
#[inline]
pub fn dist2<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = T::zero();
    for (&ai, &bi) in a.iter().zip(b.iter()) {
        let d = ai - bi;
        acc += d * d;
    }
    acc
}

/// Euclidean norm of a coordinate slice.
#[inline]
pub fn norm<T: Real>(a: &[T]) -> T {
    let mut acc = T::zero();
    for &ai in a {
        acc += ai * ai;
    }
    acc.sqrt()
}
