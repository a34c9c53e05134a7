//! Error types shared across the crate.

use thiserror::Error;

/// Errors from turning expression source text into an AST.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
}

/// Errors from numerical evaluation of an expression or jet.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum EvalError {
    /// log/sqrt of a non-positive value, or division by zero, with the
    /// offending subexpression rendered back to text.
    #[error("domain error: {op} in `{expr}`")]
    Domain { op: &'static str, expr: String },
    #[error("parameter `{name}` is not bound")]
    UnboundParameter { name: String },
}

/// Errors from dense tensor algebra.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum TensorError {
    #[error("variance mismatch: slot {a} and slot {b} must pair an upper with a lower index")]
    VarianceMismatch { a: usize, b: usize },
    #[error("shape mismatch: {message}")]
    ShapeMismatch { message: String },
    #[error("singular metric: |det g| = {det:e} below threshold")]
    SingularMetric { det: f64 },
}

/// Errors raised while assembling curvature or running an identity check.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum CheckError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("jet budget exceeded: needed order {needed}, have {available}")]
    JetBudgetExceeded { needed: usize, available: usize },
    #[error("dimension {n} too small: {what}")]
    DimensionTooSmall { n: usize, what: String },
    #[error("missing field `{name}` required by sub-check `{check}`")]
    MissingField { name: String, check: String },
    #[error("metric is not Riemannian at the sampled point")]
    NotRiemannian,
    #[error("metric is not Lorentzian (-,+,+,+)")]
    NotLorentzian,
    #[error("vector is not unit timelike: u.u = {norm}")]
    NotUnitTimelike { norm: f64 },
    #[error("dimension must be 4, got {n}")]
    DimensionNot4 { n: usize },
    #[error("eigenframe is degenerate: min eigenvalue gap {gap:e}")]
    DegenerateFrame { gap: f64 },
    #[error("deformation tensor is not symmetric: max asymmetry {asym:e}")]
    AsymmetricDeformation { asym: f64 },
    #[error("operation requires constant coefficients")]
    NonConstantCoefficients,
}

/// Errors from metric/field construction and validation.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum MetricError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("bad metric definition: {0}")]
    BadDefinition(String),
    #[error("signature mismatch at sampled point {point:?}: expected {expected:?}, got {got:?}")]
    SignatureMismatch {
        point: Vec<f64>,
        expected: Vec<i8>,
        got: Vec<i8>,
    },
}

/// Errors from the catalog and file layer.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum CatalogError {
    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),
    #[error("bad parameter for catalog entry: {0}")]
    BadParameter(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
}
