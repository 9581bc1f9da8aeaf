//! Scalar abstraction for the numeric core.
//!
//! Embedding and classifier math is generic over the stored float width:
//! `f32` is the production type (and the model-file encoding), `f64` is
//! used by tests that compare analytic gradients against finite
//! differences, where single precision would drown the check in rounding
//! noise. Dot products and sigmoid evaluation always accumulate in `f64`
//! regardless of the stored type.

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Stored scalar type of embedding and classifier parameters.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Copy + Default + std::fmt::Display + 'static
{
    /// Byte width in the model file encoding.
    const WIDTH: u8;

    fn to_le_bytes_vec(self) -> Vec<u8>;
    fn from_le_slice(bytes: &[u8]) -> Self;

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }

    #[inline]
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("representable scalar")
    }
}

impl Scalar for f32 {
    const WIDTH: u8 = 4;

    fn to_le_bytes_vec(self) -> Vec<u8> {
        self.to_le_bytes().to_vec()
    }

    fn from_le_slice(bytes: &[u8]) -> Self {
        f32::from_le_bytes(bytes.try_into().expect("4 bytes"))
    }
}

impl Scalar for f64 {
    const WIDTH: u8 = 8;

    fn to_le_bytes_vec(self) -> Vec<u8> {
        self.to_le_bytes().to_vec()
    }

    fn from_le_slice(bytes: &[u8]) -> Self {
        f64::from_le_bytes(bytes.try_into().expect("8 bytes"))
    }
}

/// Dot product accumulated in double precision.
#[inline]
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0f64;
    for (x, y) in a.iter().zip(b.iter()) {
        acc += x.to_f64_lossy() * y.to_f64_lossy();
    }
    acc
}

/// Numerically stable sigmoid; branches on sign to avoid overflow.
#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Stable `log(sigmoid(x))`.
#[inline]
pub fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}
