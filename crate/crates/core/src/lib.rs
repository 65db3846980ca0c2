//! Sparse regression toolkit.
//!
//! Five feature-selection estimators over a common data model:
//!
//! * [`cio`]: exact cardinality-constrained ridge regression solved by outer
//!   approximation with an in-house branch-and-bound master problem.
//! * [`saddle`]: the Boolean relaxation of the same problem, solved by a dual
//!   projected sub-gradient method (constrained and cardinality-penalized).
//! * [`penalties`]: Lasso / Elastic-Net, MCP and SCAD by pathwise coordinate
//!   descent (OLS, and logistic through iteratively reweighted least squares).
//!
//! plus synthetic data generation ([`datagen`]), selection and prediction
//! metrics with hyper-parameter search ([`metrics`], [`cv`]) and the benchmark
//! harness behind the `bench` binary ([`bench`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod cio;
pub mod cv;
pub mod datagen;
mod error;
pub mod linalg;
pub mod losses;
pub mod metrics;
pub mod penalties;
pub mod saddle;
mod support;

pub use datagen::{Covariance, Dataset, SyntheticSpec, Task, WeightScheme};
pub use error::{Error, Result};
pub use losses::{LossKind, LossModel};
pub use metrics::LinearFit;
pub use support::Support;

/// Coefficients with magnitude at or below this are treated as zero when
/// reading off a support.
pub const ZERO_THRESHOLD: f64 = 1e-10;
