use thiserror::Error;

use crate::coefficients::{EvalError, Interpretation, ParseError};

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse {which}: {source}")]
    Expression {
        which: &'static str,
        #[source]
        source: ParseError,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("invalid domain: {0}")]
    Domain(String),
    #[error("expected an {expected} specification, got {found}")]
    WrongInterpretation {
        expected: Interpretation,
        found: Interpretation,
    },
    #[error("hypotheses not met: {0}")]
    Hypotheses(String),
    #[error("Feller test not applicable; boundary non-degenerate at {0}")]
    NonDegenerate(f64),
    #[error("{0}")]
    Precondition(String),
    #[error("quadrature failure: {0}")]
    Quadrature(String),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("config: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
