use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The result does not fit in binary64; use the scaled variant.
    #[error("overflow: {0}")]
    Overflow(String),

    /// A series hit its term cap before the stopping rule triggered.
    #[error("series did not converge after {terms} terms (partial sum {partial}, last term {last_term})")]
    NonConvergence {
        terms: usize,
        partial: f64,
        last_term: f64,
    },

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature tolerance not met after {subdivisions} subdivisions: estimate {value} +/- {abs_error}")]
    ToleranceNotMet {
        value: f64,
        abs_error: f64,
        subdivisions: usize,
    },

    /// A bound whose hypotheses do not hold at the requested parameters.
    #[error("bound not applicable: {0}")]
    Inapplicable(String),

    /// The supremum scan found its best point on the boundary of the grid.
    #[error("no interior maximum: best ratio {boundary_value} at x = {at_x} on the scan boundary")]
    NoInteriorMaximum { boundary_value: f64, at_x: f64 },

    /// Malformed configuration or table input.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn parse_error(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}
