use thiserror::Error;

use crate::surface::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid triangulation: {0}")]
    Invalid(ValidationReport),

    #[error("{what} must be strictly positive and finite, got {value}")]
    NonPositive { what: &'static str, value: f64 },

    #[error("{what} must be finite, got {value}")]
    NonFinite { what: &'static str, value: f64 },

    #[error("boundary index {index} out of range 1..={n}")]
    BoundaryOutOfRange { index: usize, n: usize },

    #[error("expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// `e^{w_a+w_b} cosh(l0/2) <= 1` on some edge, so no positive length exists.
    #[error("conformal factor outside the admissible domain ({}, log margin {margin:e})", edge_label(*.edge))]
    Domain { edge: Option<u32>, margin: f64 },

    #[error("coefficient matrix input {value} must exceed 1")]
    CoshBelowOne { value: f64 },

    #[error("quadrature did not converge within depth {depth} (last estimate {estimate:e}, error {error:e})")]
    Quadrature {
        depth: u32,
        estimate: f64,
        error: f64,
    },

    #[error("step size underflow at t = {t:e} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("flow left the admissible domain at t = {t:e}; integrator defect")]
    FlowDomain { t: f64 },

    #[error("target must be strictly positive (component {index} has {value})")]
    TargetNotPositive { index: usize, value: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    MaxIterations { iterations: usize, residual: f64 },

    #[error("line search failed at iteration {iteration} (residual {residual:e})")]
    LineSearch { iteration: usize, residual: f64 },

    #[error("invalid option: {0}")]
    Options(String),
}

impl Error {
    /// True for failures of a numerical algorithm, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. }
                | Error::StepUnderflow { .. }
                | Error::FlowDomain { .. }
                | Error::MaxIterations { .. }
                | Error::LineSearch { .. }
        )
    }
}

impl Error {
    /// Short stable identifier, suitable for machine-readable error lines.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Invalid(_) => "invalid",
            Error::NonPositive { .. } => "non-positive",
            Error::NonFinite { .. } => "non-finite",
            Error::BoundaryOutOfRange { .. } => "boundary-range",
            Error::DimensionMismatch { .. } => "dimension",
            Error::Domain { .. } => "domain",
            Error::CoshBelowOne { .. } => "cosh-below-one",
            Error::Quadrature { .. } => "quadrature",
            Error::StepUnderflow { .. } => "step-underflow",
            Error::FlowDomain { .. } => "flow-domain",
            Error::TargetNotPositive { .. } => "target",
            Error::MaxIterations { .. } => "max-iterations",
            Error::LineSearch { .. } => "line-search",
            Error::Options(_) => "options",
        }
    }
}

fn edge_label(edge: Option<u32>) -> String {
    match edge {
        Some(id) => format!("edge {id}"),
        None => "edge".into(),
    }
}

pub(crate) fn check_positive(what: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else if value.is_nan() || value.is_infinite() {
        Err(Error::NonFinite { what, value })
    } else {
        Err(Error::NonPositive { what, value })
    }
}

pub(crate) fn check_finite(what: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { what, value })
    }
}
