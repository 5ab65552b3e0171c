//! Numerical toolkit for one-dimensional diffusions whose noise coefficient
//! vanishes at a boundary.

pub mod boundary;
pub mod coefficients;
pub mod error;
pub mod meantime;
pub mod quadrature;
pub mod simulate;
pub mod transform;

pub use boundary::{
    accessibility_integral, boundary_report, classify_boundary, classify_via_integral,
    BoundaryClass, BoundaryReport, IntegralVerdict,
};
pub use coefficients::{
    differentiate, parse_expr, validate_spec, DiffusionSpec, Domain, Expr, Interpretation, Side,
    ValidationReport,
};
pub use error::{Error, Result};
pub use transform::{
    absorbing_state_audit, ito_to_stratonovich, stratonovich_to_ito, Audit, TransformReport,
};
pub use meantime::{
    feller_exit_time, logistic_mean_time, solve_mean_absorption_time, BoundaryCondition,
    BoundaryConditions, MeanTimeSolution,
};
pub use simulate::{
    ensemble, simulate_ito, simulate_stratonovich, verify_solution, EnsembleStats, Path,
};
