//! Scalar abstraction for the closed-form layers (maps and circle symbols).

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::{de::DeserializeOwned, Serialize};

/// Floating point type the map algebra and symbol analysis are generic over: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + rustfft::FftNum
    + Debug
    + Display
    + Default
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant, saturating tolerances at a small multiple of machine epsilon
    /// so that thresholds written for `f64` stay meaningful in lower precision.
    fn tol(x: f64) -> Self {
        let t = Self::from_f64(x).unwrap_or_else(Self::epsilon);
        t.max(Self::epsilon() * Self::from_f64(64.0).unwrap())
    }

    fn lit(x: f64) -> Self {
        Self::from_f64(x).unwrap()
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
