//! Smooth curves given analytically: closed-form inner and outer charts and
//! numerical checks of the identities they satisfy.

use thiserror::Error;

pub mod charts;
pub mod curve;
pub mod hessian;
pub mod isothermal;
pub mod refine;

pub use charts::{
    asymptotic_coeffs, correspondence, grad_f, grad_outer, inner_chart, inner_closed, outer_chart, outer_closed,
    outer_continued, pick_invariant_inner, projections_pi, AsymptoticCoeffs, ContinuedOuter, InnerChart, OuterChart,
};
pub use curve::{AnalyticCurve, PolyCurve};
pub use hessian::{hessian_det_residual, HessianResidual, SampleRegion, Side};
pub use isothermal::{default_probe, isothermal_tangent_check, outer_area_oracle, IsothermalReport, OuterArea};
pub use refine::{refinement_experiment, RefinementRow};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error("outside the chart domain: {0}")]
    DomainViolation(String),
    #[error("no closed form or sample region for curve kind {0}")]
    UnsupportedKind(&'static str),
    #[error("chart inversion failed (residual {residual:e})")]
    ChartInversionFailed { residual: f64 },
    #[error("ω vanishes")]
    OmegaZero,
    #[error("isothermal tangent lines cross the curve")]
    CrossingTangents,
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
}
