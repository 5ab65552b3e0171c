//! Classification of degenerate boundary points.
//!
//! At a finite endpoint `a` with `g(a) = 0`, `g'(a) != 0` and `f(a) >= 0` the
//! boundary is accessible iff `f(a) < g'(a)` and absorbing iff `f(a) = 0`.
//! Independently of that criterion, [`accessibility_integral`] evaluates the
//! speed/scale double integral
//!
//! ```text
//! ∫_{a+ε}^{a+δ} ∫_x^{a+δ} (1/g(y)) exp(∫_x^y f(s)/g(s) ds) dy dx
//! ```
//!
//! whose finiteness as `ε → 0` is equivalent to accessibility.
//!
//! Right endpoints are handled in the reflected frame `y = b - x`, where the
//! drift changes sign. All reported `f_at`/`gprime_at` values are in this
//! inward frame, so the same inequalities apply on both sides.

use serde::{Deserialize, Serialize};

use crate::coefficients::{validate_spec, DiffusionSpec, Interpretation, Side, DEGENERACY_TOL};
use crate::error::{Error, Result};
use crate::quadrature::{cumulative_simpson, gauss_legendre_64, gauss_legendre_8};

/// ε values at which the accessibility integral is sampled.
pub const EPSILONS: [f64; 5] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
/// Simpson intervals per decade of the log-stretched variable.
const SIMPSON_PER_DECADE: f64 = 2000.0;
/// `|f(a)| <= ABSORBING_TOL` counts as `f(a) = 0`.
pub const ABSORBING_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryClass {
    Inaccessible,
    AccessibleAbsorbing,
    /// Instantaneously reflecting.
    AccessibleReflecting,
}

impl BoundaryClass {
    pub fn is_accessible(self) -> bool {
        self != BoundaryClass::Inaccessible
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IntegralVerdict {
    Finite,
    Divergent,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub endpoint: f64,
    pub side: Side,
    /// Inward drift at the endpoint: `f(a)` or `-f(b)`.
    pub f_at: f64,
    /// Inward slope of `g`: `g'(a)` or `-g'(b)`.
    pub gprime_at: f64,
    pub analytic_class: BoundaryClass,
    /// `(ε, integral)` pairs.
    pub integral_estimates: Vec<(f64, f64)>,
    pub integral_verdict: IntegralVerdict,
    pub agreement: bool,
}

/// `0.5 · min(1, b - a)`.
pub fn default_delta(s: &DiffusionSpec) -> f64 {
    let width = s.domain.b.map_or(f64::INFINITY, |b| b - s.domain.a);
    0.5 * width.min(1.0)
}

/// The spec seen from one endpoint: `y` is the distance into the domain.
struct InwardFrame<'a> {
    spec: &'a DiffusionSpec,
    endpoint: f64,
    dir: f64,
}

impl<'a> InwardFrame<'a> {
    fn new(spec: &'a DiffusionSpec, endpoint: f64) -> Result<(Self, Side)> {
        let side = spec.domain.side_of(endpoint).ok_or_else(|| {
            Error::Precondition(format!(
                "{endpoint} is not a finite endpoint of {}",
                spec.domain
            ))
        })?;
        let dir = if side == Side::Left { 1.0 } else { -1.0 };
        Ok((InwardFrame { spec, endpoint, dir }, side))
    }

    fn x(&self, y: f64) -> f64 {
        self.endpoint + self.dir * y
    }

    fn f(&self, y: f64) -> Result<f64> {
        Ok(self.dir * self.spec.f.eval(self.x(y))?)
    }

    fn g(&self, y: f64) -> Result<f64> {
        Ok(self.spec.g.eval(self.x(y))?)
    }
}

/// Local hypotheses at one endpoint; returns the inward `(f(a), g'(a))`.
fn check_endpoint(s: &DiffusionSpec, endpoint: f64) -> Result<(f64, f64, Side)> {
    s.require(Interpretation::Ito)?;
    let (frame, side) = InwardFrame::new(s, endpoint)?;
    if frame.g(0.0)?.abs() > DEGENERACY_TOL {
        return Err(Error::NonDegenerate(endpoint));
    }
    let report = validate_spec(s);
    if !report.g_nonnegative {
        return Err(Error::Hypotheses(report.failures.join("; ")));
    }
    let f_at = frame.f(0.0)?;
    let gprime_at = frame.dir * s.g_prime().eval(endpoint)?;
    if gprime_at.abs() <= DEGENERACY_TOL {
        return Err(Error::Hypotheses(format!("g'({endpoint}) = 0")));
    }
    if f_at < -ABSORBING_TOL {
        return Err(Error::Hypotheses(format!(
            "compatibility violated at {endpoint}: inward drift {f_at} < 0; classification refused"
        )));
    }
    Ok((f_at, gprime_at, side))
}

fn class_from(f_at: f64, gprime_at: f64) -> BoundaryClass {
    if f_at.abs() <= ABSORBING_TOL {
        BoundaryClass::AccessibleAbsorbing
    } else if f_at >= gprime_at {
        BoundaryClass::Inaccessible
    } else {
        BoundaryClass::AccessibleReflecting
    }
}

/// Analytic classification of a degenerate endpoint of an Itô spec.
pub fn classify_boundary(s: &DiffusionSpec, endpoint: f64) -> Result<BoundaryClass> {
    let (f_at, gprime_at, _) = check_endpoint(s, endpoint)?;
    Ok(class_from(f_at, gprime_at))
}

/// The speed/scale double integral over `[a+ε, a+δ]` (inward frame for right
/// endpoints).
pub fn accessibility_integral(s: &DiffusionSpec, endpoint: f64, delta: f64, eps: f64) -> Result<f64> {
    Ok(accessibility_integrals(s, endpoint, delta, &[eps])?[0])
}

/// [`accessibility_integral`] at several ε sharing one table of the inner
/// exponent.
///
/// Work happens in `u = ln(y)` with `y` the distance from the endpoint, which
/// turns the power-law behaviour near the endpoint into smooth exponentials.
/// `F(u) = ∫_{ln δ}^{u} f/g dy` is tabulated by cumulative Simpson with 2,000
/// intervals per decade; the double integral is iterated Gauss–Legendre with
/// 64 nodes per decade in `u`, reading `F` from the table plus an 8-node
/// correction over the remaining fraction of a table step.
pub fn accessibility_integrals(
    s: &DiffusionSpec,
    endpoint: f64,
    delta: f64,
    epsilons: &[f64],
) -> Result<Vec<f64>> {
    let (frame, _) = InwardFrame::new(s, endpoint)?;
    let eps_min = epsilons.iter().copied().fold(f64::INFINITY, f64::min);
    if !(eps_min > 0.0 && epsilons.iter().all(|&e| e < delta)) {
        return Err(Error::Precondition(format!(
            "need 0 < ε < δ, got δ = {delta}, ε = {epsilons:?}"
        )));
    }
    let table = ExponentTable::build(&frame, eps_min.ln(), delta.ln())?;
    epsilons
        .iter()
        .map(|&eps| table.double_integral(eps.ln()))
        .collect()
}

struct ExponentTable<'a> {
    frame: &'a InwardFrame<'a>,
    u_lo: f64,
    u_hi: f64,
    h: f64,
    /// F at the table nodes.
    values: Vec<f64>,
}

impl<'a> ExponentTable<'a> {
    fn build(frame: &'a InwardFrame<'a>, u_lo: f64, u_hi: f64) -> Result<Self> {
        let decades = (u_hi - u_lo) / std::f64::consts::LN_10;
        let mut n = (SIMPSON_PER_DECADE * decades).ceil().max(2.0) as usize;
        n += n % 2;
        let h = (u_hi - u_lo) / n as f64;
        let mut integrand = Vec::with_capacity(n + 1);
        for k in 0..=n {
            integrand.push(Self::log_integrand(frame, u_lo + k as f64 * h)?);
        }
        let cum = cumulative_simpson(&integrand, h);
        let top = cum[n];
        Ok(ExponentTable {
            frame,
            u_lo,
            u_hi,
            h,
            values: cum.iter().map(|c| c - top).collect(),
        })
    }

    /// `f/g · dy/du` at `u`.
    fn log_integrand(frame: &InwardFrame<'_>, u: f64) -> Result<f64> {
        let y = u.exp();
        let v = frame.f(y)? / frame.g(y)? * y;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Quadrature(format!(
                "f/g is not finite at x = {}",
                frame.x(y)
            )))
        }
    }

    fn exponent(&self, u: f64) -> Result<f64> {
        let k = (((u - self.u_lo) / self.h).round() as usize).min(self.values.len() - 1);
        let uk = self.u_lo + k as f64 * self.h;
        if (u - uk).abs() < 1e-15 {
            return Ok(self.values[k]);
        }
        let mut err = None;
        let corr = gauss_legendre_8().integrate(uk, u, |v| {
            Self::log_integrand(self.frame, v).unwrap_or_else(|e| {
                err = Some(e);
                0.0
            })
        });
        match err {
            Some(e) => Err(e),
            None => Ok(self.values[k] + corr),
        }
    }

    /// `∫_{u_eps}^{u_hi} e^{-F(u)} e^u ∫_u^{u_hi} e^{F(v)} e^v / g(e^v) dv du`.
    fn double_integral(&self, u_eps: f64) -> Result<f64> {
        let mut total = 0.0;
        for (lo, hi) in decade_panels(u_eps, self.u_hi) {
            for (node, weight) in gl_nodes(lo, hi) {
                let inner = self.inner(node)?;
                total += weight * (-self.exponent(node)? + node).exp() * inner;
            }
        }
        if total.is_finite() {
            Ok(total)
        } else {
            Err(Error::Quadrature(format!(
                "non-finite accessibility integral at ε = {}",
                u_eps.exp()
            )))
        }
    }

    fn inner(&self, u: f64) -> Result<f64> {
        let mut sum = 0.0;
        for (lo, hi) in decade_panels(u, self.u_hi) {
            for (node, weight) in gl_nodes(lo, hi) {
                let y = node.exp();
                let g = self.frame.g(y)?;
                if g <= 0.0 {
                    return Err(Error::Quadrature(format!(
                        "g vanishes inside the domain at x = {}",
                        self.frame.x(y)
                    )));
                }
                sum += weight * (self.exponent(node)? + node).exp() / g;
            }
        }
        Ok(sum)
    }
}

/// Splits `[lo, hi]` into panels at most one decade (ln 10) wide, measured from `hi`.
fn decade_panels(lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut top = hi;
    while top > lo {
        let bottom = (top - std::f64::consts::LN_10).max(lo);
        out.push((bottom, top));
        top = bottom;
    }
    out
}

fn gl_nodes(lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    gauss_legendre_64()
        .as_node_weight_pairs()
        .iter()
        .map(move |&(x, w)| (mid + half * x, half * w))
}

/// Turns the sequence of integral values at decreasing ε into a verdict.
///
/// Finite: the last step changes the value by less than 1e-3 relative, or the
/// steps contract geometrically and two successive Aitken extrapolations of
/// the limit agree to 1e-3 relative (needed for slow `ε^p` convergence with
/// small `p`). Divergent: every value exceeds the previous by at least 5% and
/// the last step is not shrinking. Otherwise Indeterminate.
pub fn verdict_from_sequence(values: &[f64]) -> IntegralVerdict {
    const CAUCHY_RTOL: f64 = 1e-3;
    const GROWTH_RATIO: f64 = 1.05;
    const CONTRACTION: f64 = 0.9;

    let n = values.len();
    if n < 3 || values.iter().any(|v| !v.is_finite()) {
        return IntegralVerdict::Indeterminate;
    }
    let d: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let last = values[n - 1];

    if d[d.len() - 1].abs() < CAUCHY_RTOL * last.abs() {
        return IntegralVerdict::Finite;
    }

    if n >= 4 {
        let m = d.len();
        let contracting = (m - 3..m).all(|k| k >= 1 && d[k - 1] != 0.0)
            && (m - 2..m).all(|k| d[k] / d[k - 1] > 0.0 && d[k] / d[k - 1] <= CONTRACTION);
        if contracting {
            let aitken = |k: usize| {
                let r = d[k] / d[k - 1];
                values[k + 1] + d[k] * r / (1.0 - r)
            };
            let (la, lb) = (aitken(m - 1), aitken(m - 2));
            if (la - lb).abs() < CAUCHY_RTOL * la.abs() {
                return IntegralVerdict::Finite;
            }
        }
    }

    let growing = values
        .windows(2)
        .all(|w| w[0] > 0.0 && w[1] / w[0] >= GROWTH_RATIO);
    let not_slowing = d.len() < 2 || d[d.len() - 1] >= CONTRACTION * d[d.len() - 2];
    if growing && not_slowing {
        return IntegralVerdict::Divergent;
    }
    IntegralVerdict::Indeterminate
}

/// Samples the integral at [`EPSILONS`] with the default δ and returns the verdict.
pub fn classify_via_integral(
    s: &DiffusionSpec,
    endpoint: f64,
) -> Result<(IntegralVerdict, Vec<(f64, f64)>)> {
    check_endpoint(s, endpoint)?;
    let values = accessibility_integrals(s, endpoint, default_delta(s), &EPSILONS)?;
    let verdict = verdict_from_sequence(&values);
    Ok((verdict, EPSILONS.iter().copied().zip(values).collect()))
}

fn agrees(verdict: IntegralVerdict, class: BoundaryClass) -> bool {
    match verdict {
        IntegralVerdict::Finite => class.is_accessible(),
        IntegralVerdict::Divergent => !class.is_accessible(),
        IntegralVerdict::Indeterminate => false,
    }
}

/// Both classifications of one endpoint.
pub fn boundary_report(s: &DiffusionSpec, endpoint: f64) -> Result<BoundaryReport> {
    let (f_at, gprime_at, side) = check_endpoint(s, endpoint)?;
    let analytic_class = class_from(f_at, gprime_at);
    let (integral_verdict, integral_estimates) = classify_via_integral(s, endpoint)?;
    Ok(BoundaryReport {
        endpoint,
        side,
        f_at,
        gprime_at,
        analytic_class,
        integral_estimates,
        integral_verdict,
        agreement: agrees(integral_verdict, analytic_class),
    })
}

/// Reports for every degenerate finite endpoint of the spec.
pub fn classify_all(s: &DiffusionSpec) -> Result<Vec<BoundaryReport>> {
    let mut out = Vec::new();
    for (e, _) in s.domain.endpoints() {
        if s.g.eval(e)?.abs() <= DEGENERACY_TOL {
            out.push(boundary_report(s, e)?);
        }
    }
    Ok(out)
}
