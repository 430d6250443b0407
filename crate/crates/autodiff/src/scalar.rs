use std::fmt::{Debug, Display};

/// Element types the tape supports. Training runs in `f32`; gradient
/// checking runs the same graphs in `f64`, where central differences are
/// trustworthy.
pub trait Scalar: num_traits::Float + Copy + Debug + Display + 'static {
    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
}

impl Scalar for f32 {
    #[inline(always)]
    fn from_f64(v: f64) -> Self {
        v as f32
    }
    #[inline(always)]
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    #[inline(always)]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline(always)]
    fn to_f64(self) -> f64 {
        self
    }
}
