//! Two-sided bounds for the damped Struve integrals
//! `int_0^x e^(-gamma t) t^(-nu) L_(nu+n)(t) dt`.
//!
//! Layers, bottom up:
//! - [`gamma`], [`hypergeometric`], [`struve`]: special functions.
//! - [`integrals`], [`quadrature`]: three independent routes to the integrals.
//! - [`bounds`], [`dconst`], [`report`]: the bounds and the constant gating
//!   the damped upper bounds.
//! - [`table`], [`verify`]: tables of relative errors and the grid checks.

// Coefficient tables keep their full reference digits, and `!(a > b)` is
// the idiom used throughout to reject NaN along with out-of-range values.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod dconst;
pub mod error;
pub mod format;
pub mod gamma;
pub mod hypergeometric;
pub mod integrals;
pub mod quadrature;
pub mod report;
pub mod series;
pub mod struve;
pub mod table;
pub mod verify;

pub use bounds::{coefficients, BoundCoefficients, BoundEngine, BoundId};
pub use dconst::{d_constant, DConstant};
pub use error::{Error, Result};
pub use integrals::IntegralSpec;
pub use report::{bound_report, BoundReport};
pub use series::SeriesEval;
pub use struve::{struve_l, struve_l_scaled, Order};
pub use table::{TableArtifact, TableKind};
pub use verify::{CheckKind, GridConfig, VerificationReport, Verifier};
