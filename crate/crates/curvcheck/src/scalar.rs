//! The scalar abstraction shared by every tensor kernel.
//!
//! All tensor operations are written once, generic over [`Scalar`], and run
//! either on plain `f64` values or on [`Jet`]s. Evaluating an identity in jet
//! mode is what makes covariant derivatives of derived tensors exact.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use crate::jet::Jet;

pub trait Scalar:
    Clone + Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    /// Additive identity with the same shape (order, base point) as `self`.
    fn zero_like(&self) -> Self;
    /// Constant `v` with the same shape as `self`.
    fn lit(&self, v: f64) -> Self;
    /// The plain numerical value (the order-0 coefficient for jets).
    fn value(&self) -> f64;
    /// Multiplication by a plain constant.
    fn scale(&self, f: f64) -> Self;
    /// Reciprocal; `None` when the value is exactly zero.
    fn try_recip(&self) -> Option<Self>;
    /// Square root; `None` for non-positive values.
    fn try_sqrt(&self) -> Option<Self>;

    fn one_like(&self) -> Self {
        self.lit(1.0)
    }
}

impl Scalar for f64 {
    fn zero_like(&self) -> f64 {
        0.0
    }
    fn lit(&self, v: f64) -> f64 {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn scale(&self, f: f64) -> f64 {
        self * f
    }
    fn try_recip(&self) -> Option<f64> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }
    fn try_sqrt(&self) -> Option<f64> {
        if *self < 0.0 {
            None
        } else {
            Some(self.sqrt())
        }
    }
}

impl Scalar for Jet {
    fn zero_like(&self) -> Jet {
        Jet::zero_like(self)
    }
    fn lit(&self, v: f64) -> Jet {
        self.constant_like(v)
    }
    fn value(&self) -> f64 {
        Jet::value(self)
    }
    fn scale(&self, f: f64) -> Jet {
        Jet::scale(self, f)
    }
    fn try_recip(&self) -> Option<Jet> {
        self.recip().ok()
    }
    fn try_sqrt(&self) -> Option<Jet> {
        Jet::sqrt(self).ok()
    }
}
