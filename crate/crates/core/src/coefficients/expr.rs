//! Expression tree for coefficient functions of one variable `x`.

use std::fmt;

use thiserror::Error;

/// Elementary functions accepted by the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Sqrt,
    Exp,
    Log,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Log => "log",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        match name {
            "sqrt" => Some(Func::Sqrt),
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            _ => None,
        }
    }
}

/// Arithmetic expression in the single variable `x`.
///
/// Powers carry a nonnegative integer exponent; this keeps every expression
/// real-analytic wherever its `sqrt`/`log` arguments are positive.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Call(Func, Box<Expr>),
}

/// Evaluation failure: the offending sub-expression is rendered into the error.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("domain error in `{expr}` at x = {x}: {reason}")]
pub struct EvalError {
    pub expr: String,
    pub x: f64,
    pub reason: &'static str,
}

// Plain constructors; the operator traits would hide the boxing.
#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn var() -> Expr {
        Expr::Var
    }

    pub fn neg(e: Expr) -> Expr {
        Expr::Neg(Box::new(e))
    }

    pub fn add(l: Expr, r: Expr) -> Expr {
        Expr::Add(Box::new(l), Box::new(r))
    }

    pub fn sub(l: Expr, r: Expr) -> Expr {
        Expr::Sub(Box::new(l), Box::new(r))
    }

    pub fn mul(l: Expr, r: Expr) -> Expr {
        Expr::Mul(Box::new(l), Box::new(r))
    }

    pub fn div(l: Expr, r: Expr) -> Expr {
        Expr::Div(Box::new(l), Box::new(r))
    }

    pub fn pow(base: Expr, exponent: u32) -> Expr {
        Expr::Pow(Box::new(base), exponent)
    }

    pub fn call(func: Func, arg: Expr) -> Expr {
        Expr::Call(func, Box::new(arg))
    }

    /// True when the expression does not mention `x`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) => true,
            Expr::Var => false,
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Call(_, e) => e.is_constant(),
            Expr::Add(l, r) | Expr::Sub(l, r) | Expr::Mul(l, r) | Expr::Div(l, r) => {
                l.is_constant() && r.is_constant()
            }
        }
    }

    /// IEEE-754 evaluation at `x`.
    ///
    /// `sqrt` of a negative, `log` of a non-positive argument and division by
    /// zero are reported as [`EvalError`] instead of producing NaN or infinity.
    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        match self {
            Expr::Num(v) => Ok(*v),
            Expr::Var => Ok(x),
            Expr::Neg(e) => Ok(-e.eval(x)?),
            Expr::Add(l, r) => Ok(l.eval(x)? + r.eval(x)?),
            Expr::Sub(l, r) => Ok(l.eval(x)? - r.eval(x)?),
            Expr::Mul(l, r) => Ok(l.eval(x)? * r.eval(x)?),
            Expr::Div(l, r) => {
                let den = r.eval(x)?;
                if den == 0.0 {
                    return Err(self.domain_error(x, "division by zero"));
                }
                Ok(l.eval(x)? / den)
            }
            Expr::Pow(b, n) => Ok(powi(b.eval(x)?, *n)),
            Expr::Call(func, arg) => {
                let v = arg.eval(x)?;
                match func {
                    Func::Sqrt if v < 0.0 => Err(self.domain_error(x, "sqrt of a negative number")),
                    Func::Sqrt => Ok(v.sqrt()),
                    Func::Log if v <= 0.0 => {
                        Err(self.domain_error(x, "log of a non-positive number"))
                    }
                    Func::Log => Ok(v.ln()),
                    Func::Exp => Ok(v.exp()),
                }
            }
        }
    }

    fn domain_error(&self, x: f64, reason: &'static str) -> EvalError {
        EvalError {
            expr: self.to_string(),
            x,
            reason,
        }
    }

    /// Replaces every `x` with `replacement`.
    pub fn substitute(&self, replacement: &Expr) -> Expr {
        let sub = |e: &Expr| Box::new(e.substitute(replacement));
        match self {
            Expr::Num(v) => Expr::Num(*v),
            Expr::Var => replacement.clone(),
            Expr::Neg(e) => Expr::Neg(sub(e)),
            Expr::Add(l, r) => Expr::Add(sub(l), sub(r)),
            Expr::Sub(l, r) => Expr::Sub(sub(l), sub(r)),
            Expr::Mul(l, r) => Expr::Mul(sub(l), sub(r)),
            Expr::Div(l, r) => Expr::Div(sub(l), sub(r)),
            Expr::Pow(b, n) => Expr::Pow(sub(b), *n),
            Expr::Call(f, e) => Expr::Call(*f, sub(e)),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Var => 1,
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Call(_, e) => 1 + e.size(),
            Expr::Add(l, r) | Expr::Sub(l, r) | Expr::Mul(l, r) | Expr::Div(l, r) => {
                1 + l.size() + r.size()
            }
        }
    }
}

fn powi(base: f64, n: u32) -> f64 {
    match i32::try_from(n) {
        Ok(n) => base.powi(n),
        Err(_) => base.powf(f64::from(n)),
    }
}

// Printing levels, loosest first. The printer only omits parentheses where the
// grammar would re-parse the same tree.
const LEVEL_EXPR: u8 = 0;
const LEVEL_TERM: u8 = 1;
const LEVEL_FACTOR: u8 = 2;
const LEVEL_ATOM: u8 = 3;

impl Expr {
    fn level(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => LEVEL_EXPR,
            Expr::Mul(..) | Expr::Div(..) => LEVEL_TERM,
            Expr::Neg(_) | Expr::Pow(..) => LEVEL_FACTOR,
            Expr::Num(v) if v.is_sign_negative() => LEVEL_FACTOR,
            Expr::Num(_) | Expr::Var | Expr::Call(..) => LEVEL_ATOM,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min_level: u8) -> fmt::Result {
        if self.level() < min_level {
            write!(f, "(")?;
            self.write_bare(f)?;
            write!(f, ")")
        } else {
            self.write_bare(f)
        }
    }

    fn write_bare(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var => write!(f, "x"),
            Expr::Neg(e) => {
                write!(f, "-")?;
                e.write_at(f, LEVEL_ATOM)
            }
            Expr::Add(l, r) => {
                l.write_at(f, LEVEL_EXPR)?;
                write!(f, " + ")?;
                r.write_operand(f, LEVEL_TERM)
            }
            Expr::Sub(l, r) => {
                l.write_at(f, LEVEL_EXPR)?;
                write!(f, " - ")?;
                r.write_operand(f, LEVEL_TERM)
            }
            Expr::Mul(l, r) => {
                l.write_at(f, LEVEL_TERM)?;
                write!(f, "*")?;
                r.write_operand(f, LEVEL_FACTOR)
            }
            Expr::Div(l, r) => {
                l.write_at(f, LEVEL_TERM)?;
                write!(f, "/")?;
                r.write_operand(f, LEVEL_FACTOR)
            }
            Expr::Pow(b, n) => {
                b.write_at(f, LEVEL_ATOM)?;
                write!(f, "^{n}")
            }
            Expr::Call(func, arg) => {
                write!(f, "{}(", func.name())?;
                arg.write_at(f, LEVEL_EXPR)?;
                write!(f, ")")
            }
        }
    }

    // Right operands that start with a minus sign are parenthesised for readability.
    fn write_operand(&self, f: &mut fmt::Formatter<'_>, min_level: u8) -> fmt::Result {
        let leading_minus = matches!(self, Expr::Neg(_))
            || matches!(self, Expr::Num(v) if v.is_sign_negative());
        if leading_minus {
            self.write_at(f, LEVEL_ATOM)
        } else {
            self.write_at(f, min_level)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_bare(f)
    }
}
