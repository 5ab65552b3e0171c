//! Coefficient expressions and diffusion specifications.

mod expr;
mod parser;
mod spec;
mod symbolic;

pub use expr::{EvalError, Expr, Func};
pub use parser::{parse_expr, ParseError, ParseErrorKind};
pub use spec::{
    validate_spec, Compatibility, DegenerateEndpoint, DiffusionSpec, Domain, Interpretation, Side,
    ValidationReport, DEGENERACY_TOL, VALIDATION_POINTS, VALIDATION_SPAN,
};
pub use symbolic::{canonical_string, differentiate, equivalent, simplify};

pub(crate) use spec::expr_text;
