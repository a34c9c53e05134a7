//! Named residual records.
//!
//! Every identity check returns a residual tensor plus a scaled max, never a
//! boolean; pass/fail is applied only at the report layer. The scale is
//! `max(1, largest |component| among the terms entering the identity)`, so
//! identities with large internal cancellations are judged fairly.

use crate::tensor::DenseTensor;

#[derive(Debug, Clone)]
pub struct Residual {
    /// Identity id, e.g. `compat.identity4`.
    pub name: String,
    /// Short anchor label carried into reports, e.g. `Eq. (4)`.
    pub anchor: String,
    /// The left-minus-right tensor.
    pub tensor: DenseTensor<f64>,
    /// Magnitude of the largest term entering the identity, floored at 1.
    pub scale: f64,
    /// `max |tensor| / scale`.
    pub scaled_max: f64,
}

impl Residual {
    /// Build from the residual tensor and the terms whose magnitudes set the
    /// scale.
    pub fn new(
        name: impl Into<String>,
        anchor: impl Into<String>,
        tensor: DenseTensor<f64>,
        terms: &[&DenseTensor<f64>],
    ) -> Residual {
        let scale = scale_of(terms);
        let scaled_max = tensor.max_abs() / scale;
        Residual {
            name: name.into(),
            anchor: anchor.into(),
            tensor,
            scale,
            scaled_max,
        }
    }

    /// Build from a plain scalar residual magnitude.
    pub fn from_value(
        name: impl Into<String>,
        anchor: impl Into<String>,
        value: f64,
        scale_terms: &[f64],
    ) -> Residual {
        let scale = scale_terms.iter().fold(1.0f64, |a, b| a.max(b.abs()));
        Residual {
            name: name.into(),
            anchor: anchor.into(),
            tensor: DenseTensor::scalar(value),
            scale,
            scaled_max: value.abs() / scale,
        }
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.scaled_max <= tol
    }
}

/// `max(1, max |component| over all terms)`.
pub fn scale_of(terms: &[&DenseTensor<f64>]) -> f64 {
    terms.iter().fold(1.0f64, |acc, t| acc.max(t.max_abs()))
}
