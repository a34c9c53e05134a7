//! Numerical verification of curvature-tensor identities.
//!
//! The crate evaluates curvature tensors of user-supplied metrics through
//! exact truncated-Taylor (jet) differentiation and checks, pointwise and to
//! tight tolerance, a battery of compatibility identities, decompositions and
//! structure conditions: Codazzi deviations, cyclic compatibility sums,
//! generalized (ABC) curvature tensors, purity and 4-form vanishing, geodesic
//! mappings, and the electric/magnetic split of the conformal tensor.
//!
//! Entry points:
//! - [`catalog`]: built-in metrics and fixtures,
//! - [`checks`]: the named identity checks and the suite runner,
//! - [`files`]: the JSON metric/field formats consumed by the CLI.
//!
//! ```
//! use curvcheck::catalog::{self, Params};
//! use curvcheck::checks::{run_suite, Suite};
//!
//! let fixture = catalog::build("two_sphere", &Params::new()).unwrap();
//! let report = run_suite(&fixture, &Suite::all(), 4, 42, 0.0, None);
//! assert!(report.pass);
//! ```

pub mod abc;
pub mod catalog;
pub mod checks;
pub mod compat;
pub mod curvature;
pub mod decomp;
pub mod error;
pub mod expr;
pub mod files;
pub mod geodesic;
pub mod gr;
pub mod jet;
pub mod metric;
pub mod purity;
pub mod report;
pub mod residual;
pub mod scalar;
pub mod source;
pub mod synth;
pub mod tensor;

pub use error::{CatalogError, CheckError, EvalError, MetricError, ParseError, TensorError};
pub use expr::Expr;
pub use jet::Jet;
pub use scalar::Scalar;
pub use tensor::{DenseTensor, Variance};
