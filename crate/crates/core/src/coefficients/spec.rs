use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::expr::{EvalError, Expr};
use super::parser::parse_expr;
use super::symbolic::differentiate;
use crate::error::Error;

/// Points on the validation grid.
pub const VALIDATION_POINTS: usize = 1001;
/// The validation grid covers at most this much of an unbounded domain.
pub const VALIDATION_SPAN: f64 = 100.0;
/// `|g| <= DEGENERACY_TOL` counts as a zero of the diffusion coefficient.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Noise interpretation of the stochastic integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interpretation {
    Ito,
    Stratonovich,
}

impl Interpretation {
    pub fn dual(self) -> Interpretation {
        match self {
            Interpretation::Ito => Interpretation::Stratonovich,
            Interpretation::Stratonovich => Interpretation::Ito,
        }
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Interpretation::Ito => "ito",
            Interpretation::Stratonovich => "stratonovich",
        })
    }
}

impl FromStr for Interpretation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ito" | "itô" => Ok(Interpretation::Ito),
            "stratonovich" | "strat" => Ok(Interpretation::Stratonovich),
            other => Err(Error::Config(format!("unknown interpretation `{other}`"))),
        }
    }
}

/// Which end of the state space an endpoint is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// State space `[a, b]` or `[a, +∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub a: f64,
    /// `None` means `+∞`.
    pub b: Option<f64>,
}

impl Domain {
    pub fn new(a: f64, b: Option<f64>) -> Result<Domain, Error> {
        if !a.is_finite() {
            return Err(Error::Domain(format!("left endpoint must be finite, got {a}")));
        }
        if let Some(b) = b {
            if !b.is_finite() || b <= a {
                return Err(Error::Domain(format!("need a < b, got [{a}, {b}]")));
            }
        }
        Ok(Domain { a, b })
    }

    pub fn bounded(a: f64, b: f64) -> Result<Domain, Error> {
        Domain::new(a, Some(b))
    }

    pub fn half_line(a: f64) -> Result<Domain, Error> {
        Domain::new(a, None)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.a && self.b.is_none_or(|b| x <= b)
    }

    pub fn clamp(&self, x: f64) -> f64 {
        let x = x.max(self.a);
        match self.b {
            Some(b) => x.min(b),
            None => x,
        }
    }

    /// Finite endpoints with their side.
    pub fn endpoints(&self) -> Vec<(f64, Side)> {
        let mut out = vec![(self.a, Side::Left)];
        if let Some(b) = self.b {
            out.push((b, Side::Right));
        }
        out
    }

    pub fn side_of(&self, x: f64) -> Option<Side> {
        if x == self.a {
            Some(Side::Left)
        } else if self.b == Some(x) {
            Some(Side::Right)
        } else {
            None
        }
    }

    /// Uniform grid used for sign and root scans: [`VALIDATION_POINTS`] nodes on
    /// `[a, min(b, a + VALIDATION_SPAN)]`.
    pub fn validation_grid(&self) -> Vec<f64> {
        let hi = self.b.unwrap_or(f64::INFINITY).min(self.a + VALIDATION_SPAN);
        let n = VALIDATION_POINTS - 1;
        (0..=n)
            .map(|i| {
                if i == n {
                    hi
                } else {
                    self.a + (hi - self.a) * (i as f64) / (n as f64)
                }
            })
            .collect()
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.b {
            Some(b) => write!(f, "[{}, {}]", self.a, b),
            None => write!(f, "[{}, inf)", self.a),
        }
    }
}

impl FromStr for Domain {
    type Err = Error;

    /// Accepts `[a, b]`, `[a, inf)`, `[a, inf]` or a bare `a, b`.
    fn from_str(s: &str) -> Result<Domain, Error> {
        let bad = || Error::Domain(format!("unparseable domain `{s}`"));
        let t = s.trim();
        let t = t.strip_prefix('[').unwrap_or(t);
        let t = t
            .strip_suffix(']')
            .or_else(|| t.strip_suffix(')'))
            .unwrap_or(t);
        let (lo, hi) = t.split_once(',').ok_or_else(bad)?;
        let a: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi = hi.trim();
        let b = match hi {
            "inf" | "+inf" | "infinity" | "∞" => None,
            _ => Some(hi.parse::<f64>().map_err(|_| bad())?),
        };
        Domain::new(a, b)
    }
}

impl Serialize for Domain {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Domain {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `dX = f(X) dt + sqrt(2 g(X)) dW` (Itô) or `∘ dW` (Stratonovich) on a domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffusionSpec {
    #[serde(with = "expr_text")]
    pub f: Expr,
    #[serde(with = "expr_text")]
    pub g: Expr,
    pub domain: Domain,
    pub interpretation: Interpretation,
}

impl DiffusionSpec {
    pub fn new(f: Expr, g: Expr, domain: Domain, interpretation: Interpretation) -> Self {
        DiffusionSpec {
            f,
            g,
            domain,
            interpretation,
        }
    }

    /// Parses drift and diffusion text.
    pub fn parse(
        f: &str,
        g: &str,
        domain: Domain,
        interpretation: Interpretation,
    ) -> Result<Self, Error> {
        Ok(DiffusionSpec::new(
            parse_expr(f).map_err(|e| Error::Expression { which: "f", source: e })?,
            parse_expr(g).map_err(|e| Error::Expression { which: "g", source: e })?,
            domain,
            interpretation,
        ))
    }

    pub fn g_prime(&self) -> Expr {
        differentiate(&self.g)
    }

    pub fn drift(&self, x: f64) -> Result<f64, EvalError> {
        self.f.eval(x)
    }

    pub fn g_at(&self, x: f64) -> Result<f64, EvalError> {
        self.g.eval(x)
    }

    /// `sqrt(2 max(g(x), 0))`.
    pub fn sigma(&self, x: f64) -> Result<f64, EvalError> {
        Ok((2.0 * self.g.eval(x)?.max(0.0)).sqrt())
    }

    pub fn require(&self, interpretation: Interpretation) -> Result<(), Error> {
        if self.interpretation == interpretation {
            Ok(())
        } else {
            Err(Error::WrongInterpretation {
                expected: interpretation,
                found: self.interpretation,
            })
        }
    }
}

pub(crate) mod expr_text {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::coefficients::{parse_expr, Expr};

    pub fn serialize<S: Serializer>(e: &Expr, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(e)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Expr, D::Error> {
        let text = String::deserialize(d)?;
        parse_expr(&text).map_err(serde::de::Error::custom)
    }
}

/// Zero of `g` at a finite endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerateEndpoint {
    pub endpoint: f64,
    pub side: Side,
    pub gprime: f64,
    pub gprime_nonzero: bool,
}

/// Sign of the drift at a finite endpoint: `f(a) >= 0` on the left, `f(b) <= 0`
/// on the right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Compatibility {
    pub endpoint: f64,
    pub side: Side,
    pub f: f64,
    pub compatible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub g_nonnegative: bool,
    /// First grid point where `g < 0`, with the value there.
    pub g_violation: Option<(f64, f64)>,
    pub degenerate_endpoints: Vec<DegenerateEndpoint>,
    pub compatibility: Vec<Compatibility>,
    /// Evaluation failures on the grid or at endpoints.
    pub eval_errors: Vec<String>,
    pub hypotheses_met: bool,
    /// One line per failed condition.
    pub failures: Vec<String>,
}

impl ValidationReport {
    /// The set of finite endpoints where `g` vanishes.
    pub fn zero_set(&self) -> Vec<f64> {
        self.degenerate_endpoints.iter().map(|d| d.endpoint).collect()
    }

    pub fn degenerate(&self, endpoint: f64) -> Option<&DegenerateEndpoint> {
        self.degenerate_endpoints.iter().find(|d| d.endpoint == endpoint)
    }

    pub fn compatibility_at(&self, endpoint: f64) -> Option<&Compatibility> {
        self.compatibility.iter().find(|c| c.endpoint == endpoint)
    }

    pub fn into_result(self) -> Result<ValidationReport, Error> {
        if self.hypotheses_met {
            Ok(self)
        } else {
            Err(Error::Hypotheses(self.failures.join("; ")))
        }
    }
}

/// Checks the standing hypotheses: `g >= 0` on the validation grid, `g' != 0`
/// wherever `g` vanishes at a finite endpoint, and the compatibility sign of
/// `f` at every finite endpoint. Violations are reported, never thrown.
pub fn validate_spec(s: &DiffusionSpec) -> ValidationReport {
    let mut failures = Vec::new();
    let mut eval_errors = Vec::new();

    let mut g_violation = None;
    for x in s.domain.validation_grid() {
        match s.g.eval(x) {
            Ok(v) if v < -DEGENERACY_TOL => {
                g_violation = Some((x, v));
                break;
            }
            Ok(_) => {}
            Err(e) => eval_errors.push(e.to_string()),
        }
    }
    if let Some((x, v)) = g_violation {
        failures.push(format!("g is negative at x = {x} (g = {v})"));
    }

    let gp = s.g_prime();
    let mut degenerate_endpoints = Vec::new();
    let mut compatibility = Vec::new();
    for (e, side) in s.domain.endpoints() {
        match s.g.eval(e) {
            Ok(gv) if gv.abs() <= DEGENERACY_TOL => match gp.eval(e) {
                Ok(d) => {
                    let nonzero = d.abs() > DEGENERACY_TOL;
                    if !nonzero {
                        failures.push(format!("g'({e}) = 0 at a zero of g"));
                    }
                    degenerate_endpoints.push(DegenerateEndpoint {
                        endpoint: e,
                        side,
                        gprime: d,
                        gprime_nonzero: nonzero,
                    });
                }
                Err(err) => eval_errors.push(err.to_string()),
            },
            Ok(_) => {}
            Err(err) => eval_errors.push(err.to_string()),
        }
        match s.f.eval(e) {
            Ok(fv) => {
                let compatible = match side {
                    Side::Left => fv >= 0.0,
                    Side::Right => fv <= 0.0,
                };
                if !compatible {
                    let rel = if side == Side::Left { "< 0" } else { "> 0" };
                    failures.push(format!(
                        "compatibility violated: f({e}) = {fv} {rel} at the {} endpoint",
                        if side == Side::Left { "left" } else { "right" }
                    ));
                }
                compatibility.push(Compatibility {
                    endpoint: e,
                    side,
                    f: fv,
                    compatible,
                });
            }
            Err(err) => eval_errors.push(err.to_string()),
        }
    }
    eval_errors.dedup();
    if !eval_errors.is_empty() {
        failures.push(format!("evaluation failed: {}", eval_errors[0]));
    }

    ValidationReport {
        g_nonnegative: g_violation.is_none(),
        g_violation,
        degenerate_endpoints,
        compatibility,
        eval_errors,
        hypotheses_met: failures.is_empty(),
        failures,
    }
}
