//! Mean absorption time `T(x)` from `g T'' + f T' = -1`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::boundary::{classify_boundary, BoundaryClass, ABSORBING_TOL};
use crate::coefficients::{DiffusionSpec, Interpretation, DEGENERACY_TOL};
use crate::error::{Error, Result};
use crate::quadrature::{adaptive_simpson, gauss_legendre_64, gauss_legendre_8, try_integrate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryCondition {
    Dirichlet0,
    NeumannReflecting,
}

/// Per-endpoint boundary conditions; `None` picks them from the boundary
/// classification.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryConditions {
    pub left: Option<BoundaryCondition>,
    pub right: Option<BoundaryCondition>,
}

impl BoundaryConditions {
    pub fn auto() -> Self {
        Self::default()
    }

    pub fn new(left: BoundaryCondition, right: BoundaryCondition) -> Self {
        BoundaryConditions {
            left: Some(left),
            right: Some(right),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanTimeSolution {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// `[left, right]`.
    pub boundary_conditions: [BoundaryCondition; 2],
    pub residual_norm: f64,
}

impl MeanTimeSolution {
    /// Linear interpolation on the grid.
    pub fn value_at(&self, x: f64) -> Option<f64> {
        let (a, b) = (self.grid[0], *self.grid.last()?);
        if !(a..=b).contains(&x) {
            return None;
        }
        let h = (b - a) / (self.grid.len() - 1) as f64;
        let k = (((x - a) / h).floor() as usize).min(self.grid.len() - 2);
        let w = (x - self.grid[k]) / h;
        Some((1.0 - w) * self.values[k] + w * self.values[k + 1])
    }

    /// Columns `x,T`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,T\n");
        for (x, t) in self.grid.iter().zip(&self.values) {
            let _ = writeln!(out, "{x},{t}");
        }
        out
    }
}

/// Default condition at a finite endpoint.
///
/// Degenerate endpoints follow their classification; a non-degenerate endpoint
/// is treated as an exit (the process is stopped on reaching it).
fn auto_condition(s: &DiffusionSpec, endpoint: f64) -> Result<BoundaryCondition> {
    if s.g_at(endpoint)?.abs() > DEGENERACY_TOL {
        return Ok(BoundaryCondition::Dirichlet0);
    }
    match classify_boundary(s, endpoint)? {
        BoundaryClass::AccessibleAbsorbing => Ok(BoundaryCondition::Dirichlet0),
        BoundaryClass::AccessibleReflecting => Ok(BoundaryCondition::NeumannReflecting),
        BoundaryClass::Inaccessible => Err(Error::Precondition(format!(
            "endpoint {endpoint} is inaccessible; mean absorption time is not defined"
        ))),
    }
}

/// Solves the boundary value problem on `n` interior nodes of a uniform grid.
///
/// The equation is written in flux form `(p T')' = -p/g` with
/// `p = exp(∫ f/g)`. Integrating it exactly over the two cells around a node
/// gives a three-point relation whose coefficients are cell integrals of `p`
/// and `1/g`; those are evaluated by Gauss–Legendre quadrature, with
/// singularity-removing substitutions in the cells next to a degenerate
/// endpoint. The scheme is therefore exact at the nodes up to quadrature
/// error, including near endpoints where `T` has logarithmic behaviour and
/// plain central differences drop to first order.
///
/// Dirichlet endpoints get the row `T = 0`. A reflecting endpoint has zero
/// flux, which fixes `T_1 - T_0` outright. The system is tridiagonal.
pub fn solve_mean_absorption_time(
    s: &DiffusionSpec,
    n: usize,
    bcs: BoundaryConditions,
) -> Result<MeanTimeSolution> {
    s.require(Interpretation::Ito)?;
    if n < 3 {
        return Err(Error::Precondition(format!("need n >= 3 interior nodes, got {n}")));
    }
    let (a, b) = match s.domain.b {
        Some(b) => (s.domain.a, b),
        None => {
            return Err(Error::Precondition(
                "mean absorption time needs a bounded domain".into(),
            ))
        }
    };
    let left = match bcs.left {
        Some(c) => c,
        None => auto_condition(s, a)?,
    };
    let right = match bcs.right {
        Some(c) => c,
        None => auto_condition(s, b)?,
    };
    if left == BoundaryCondition::NeumannReflecting && right == BoundaryCondition::NeumannReflecting
    {
        return Err(Error::Singular(
            "both endpoints reflecting: the process is never absorbed".into(),
        ));
    }

    let m = n + 2;
    let h = (b - a) / (n + 1) as f64;
    let grid: Vec<f64> = (0..m)
        .map(|i| if i == m - 1 { b } else { a + i as f64 * h })
        .collect();

    let coeffs = Coeffs { s };
    let mut cells = Vec::with_capacity(m - 1);
    for j in 0..m - 1 {
        let (xl, xr) = (grid[j], grid[j + 1]);
        let cell = if j == 0 && coeffs.degenerate(a)? {
            coeffs.endpoint_cell(a, 1.0, xr - xl, left)?
        } else if j == m - 2 && coeffs.degenerate(b)? {
            coeffs.endpoint_cell(b, -1.0, xr - xl, right)?
        } else {
            coeffs.regular_cell(xl, xr)?
        };
        cells.push(cell);
    }

    // Row i: lo[i] T[i-1] + di[i] T[i] + up[i] T[i+1] = rhs[i]
    let mut lo = vec![0.0; m];
    let mut di = vec![0.0; m];
    let mut up = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    for i in 1..m - 1 {
        let (cl, cr) = (&cells[i - 1], &cells[i]);
        let wl = 1.0 / cl.ds_right;
        let wr = 1.0 / cr.ds_left;
        // Dividing by the source term makes each row a consistent
        // approximation of g T'' + f T' = -1.
        let norm = cr.fwd * wr + cl.bwd * wl;
        if !(norm.is_finite() && norm > 0.0 && wl.is_finite() && wr.is_finite()) {
            return Err(Error::Singular(format!("degenerate row at x = {}", grid[i])));
        }
        lo[i] = wl / norm;
        up[i] = wr / norm;
        di[i] = -(wl + wr) / norm;
        rhs[i] = -1.0;
    }
    match left {
        BoundaryCondition::Dirichlet0 => di[0] = 1.0,
        BoundaryCondition::NeumannReflecting => {
            di[0] = -1.0;
            up[0] = 1.0;
            rhs[0] = -finite(cells[0].fwd, a)?;
        }
    }
    match right {
        BoundaryCondition::Dirichlet0 => di[m - 1] = 1.0,
        BoundaryCondition::NeumannReflecting => {
            lo[m - 1] = -1.0;
            di[m - 1] = 1.0;
            rhs[m - 1] = finite(cells[m - 2].bwd, b)?;
        }
    }

    let values = thomas(&lo, &di, &up, &rhs)?;
    let residual_norm = (1..m - 1)
        .map(|i| {
            (lo[i] * values[i - 1] + di[i] * values[i] + up[i] * values[i + 1] - rhs[i]).abs()
        })
        .fold(0.0, f64::max);

    Ok(MeanTimeSolution {
        grid,
        values,
        boundary_conditions: [left, right],
        residual_norm,
    })
}

fn finite(v: f64, endpoint: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Singular(format!(
            "no reflecting condition possible at {endpoint}"
        )))
    }
}

/// Cell integrals for `[x_l, x_r]`, with `p` the scale density reciprocal.
///
/// `ds_left = ∫ p(x_l)/p`, `ds_right = ∫ p(x_r)/p`,
/// `fwd = ∫ dx ∫_{x_l}^x p(y)/(p(x) g(y)) dy`,
/// `bwd = ∫ dx ∫_x^{x_r} p(y)/(p(x) g(y)) dy`.
/// Entries that diverge at a degenerate endpoint are NaN.
#[derive(Debug, Clone, Copy)]
struct Cell {
    ds_left: f64,
    ds_right: f64,
    fwd: f64,
    bwd: f64,
}

struct Coeffs<'a> {
    s: &'a DiffusionSpec,
}

impl Coeffs<'_> {
    fn degenerate(&self, e: f64) -> Result<bool> {
        Ok(self.s.g_at(e)?.abs() <= DEGENERACY_TOL)
    }

    fn g(&self, x: f64) -> Result<f64> {
        let g = self.s.g_at(x)?;
        if g > 0.0 {
            Ok(g)
        } else {
            Err(Error::Singular(format!("g vanishes inside the domain at x = {x}")))
        }
    }

    fn ratio(&self, x: f64) -> Result<f64> {
        Ok(self.s.drift(x)? / self.g(x)?)
    }

    /// `∫_x^y f/g`.
    fn log_p(&self, x: f64, y: f64) -> Result<f64> {
        try_integrate(gauss_legendre_8(), x, y, |t| self.ratio(t))
    }

    fn regular_cell(&self, xl: f64, xr: f64) -> Result<Cell> {
        let rule = gauss_legendre_8();
        let ds_left = try_integrate(rule, xl, xr, |x| Ok::<_, Error>(self.log_p(x, xl)?.exp()))?;
        let ds_right = try_integrate(rule, xl, xr, |x| Ok::<_, Error>(self.log_p(x, xr)?.exp()))?;
        let kernel = |x: f64, y: f64| -> Result<f64> { Ok(self.log_p(x, y)?.exp() / self.g(y)?) };
        let fwd = try_integrate(rule, xl, xr, |x| try_integrate(rule, xl, x, |y| kernel(x, y)))?;
        let bwd = try_integrate(rule, xl, xr, |x| try_integrate(rule, x, xr, |y| kernel(x, y)))?;
        Ok(Cell {
            ds_left,
            ds_right,
            fwd,
            bwd,
        })
    }

    /// Cell of width `h` touching the degenerate endpoint `e`, computed in the
    /// inward distance `t = dir·(x - e)`.
    ///
    /// Near `t = 0`, `f/g = σ/t + φ(t)` with `σ = f(e)/g'(e)` (inward) and `φ`
    /// bounded, so `p ~ t^σ`. The outer variable is `t = h u^k` with
    /// `k = 3/(1 - σ)` to absorb the `t^{-σ}` singularity of `1/p`; inner
    /// integrals use `s = t (h/t)^v` (away from the endpoint) or
    /// `s = t w^{3/σ}` (toward it).
    fn endpoint_cell(&self, e: f64, dir: f64, h: f64, bc: BoundaryCondition) -> Result<Cell> {
        let x = |t: f64| e + dir * t;
        let f_in = |t: f64| -> Result<f64> { Ok(dir * self.s.drift(x(t))?) };
        let g_in = |t: f64| self.g(x(t));
        let slope = dir * self.s.g_prime().eval(e)?;
        if slope <= DEGENERACY_TOL {
            return Err(Error::Hypotheses(format!("g'({e}) = 0 at a degenerate endpoint")));
        }
        let sigma = dir * self.s.drift(e)? / slope;
        if !(-ABSORBING_TOL..1.0).contains(&sigma) {
            return Err(Error::Precondition(format!(
                "endpoint {e} is inaccessible or incompatible (f/g' = {sigma})"
            )));
        }
        let sigma = sigma.max(0.0);
        let phi = |t: f64| -> Result<f64> {
            let g = g_in(t)?;
            Ok((f_in(t)? * t - sigma * g) / (t * g))
        };
        // F(s) - F(t)
        let log_ratio = |s: f64, t: f64| -> Result<f64> {
            Ok(sigma * (s / t).ln() + try_integrate(gauss_legendre_8(), t, s, phi)?)
        };
        let rule = gauss_legendre_64();
        let k = 3.0 / (1.0 - sigma);
        let outer = |body: &dyn Fn(f64) -> Result<f64>| {
            try_integrate(rule, 0.0, 1.0, |u| {
                let t = h * u.powf(k);
                Ok::<_, Error>(body(t)? * h * k * u.powf(k - 1.0))
            })
        };

        let ds_far = outer(&|t| Ok(log_ratio(h, t)?.exp()))?;
        let far = outer(&|t| {
            let span = (h / t).ln();
            try_integrate(rule, 0.0, 1.0, |v| {
                let s = t * (span * v).exp();
                Ok::<_, Error>((log_ratio(s, t)?).exp() / g_in(s)? * s * span)
            })
        })?;
        let near = if bc == BoundaryCondition::NeumannReflecting && sigma > 0.0 {
            let k2 = 3.0 / sigma;
            outer(&|t| {
                try_integrate(rule, 0.0, 1.0, |w| {
                    let s = t * w.powf(k2);
                    let jac = t * k2 * w.powf(k2 - 1.0);
                    Ok::<_, Error>((log_ratio(s, t)?).exp() / g_in(s)? * jac)
                })
            })?
        } else {
            f64::NAN
        };

        Ok(if dir > 0.0 {
            Cell {
                ds_left: f64::NAN,
                ds_right: ds_far,
                fwd: near,
                bwd: far,
            }
        } else {
            Cell {
                ds_left: ds_far,
                ds_right: f64::NAN,
                fwd: far,
                bwd: near,
            }
        })
    }
}

/// Tridiagonal solve without pivoting.
pub fn thomas(lo: &[f64], di: &[f64], up: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let m = di.len();
    if lo.len() != m || up.len() != m || rhs.len() != m {
        return Err(Error::LengthMismatch(m, rhs.len()));
    }
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    let mut pivot = di[0];
    for i in 0..m {
        if i > 0 {
            pivot = di[i] - lo[i] * c[i - 1];
        }
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::Singular(format!("zero pivot in row {i}")));
        }
        c[i] = up[i] / pivot;
        d[i] = (rhs[i] - if i > 0 { lo[i] * d[i - 1] } else { 0.0 }) / pivot;
    }
    let mut x = d;
    for i in (0..m - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

/// `-(1-x) ln(1-x) - x ln x`, the mean absorption time of `dX = sqrt(2X(1-X)) dW`.
pub fn logistic_mean_time(x0: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x0) {
        return Err(Error::Precondition(format!("x0 = {x0} is outside [0, 1]")));
    }
    Ok(-xlogx(1.0 - x0) - xlogx(x0))
}

fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `x0 ln(M/x0)`, the mean exit time of the Feller process from `[0, M]`.
///
/// Grows without bound as `M → ∞`.
pub fn feller_exit_time(x0: f64, m: f64) -> Result<f64> {
    if !(x0 > 0.0 && x0 <= m) {
        return Err(Error::Precondition(format!("need 0 < x0 <= M, got x0 = {x0}, M = {m}")));
    }
    Ok(x0 * (m / x0).ln())
}

/// Mean absorption time for `f = g = x(1-x)` on `[0, 1]`:
///
/// ```text
/// T(x) = (e^{-x} - 1)/(e - 1) · K + e^{-x} ∫_0^x e^y ln((1-y)/y) dy,
/// K = ∫_0^1 e^y ln((1-y)/y) dy
/// ```
///
/// The logarithmic singularities are removed by `y = t²` and `1 - y = s²`
/// before adaptive Simpson at tolerance 1e-10.
pub fn drifted_logistic_mean_time(x0: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x0) {
        return Err(Error::Precondition(format!("x0 = {x0} is outside [0, 1]")));
    }
    let k = log_ratio_integral(1.0);
    let e = std::f64::consts::E;
    Ok(((-x0).exp() - 1.0) / (e - 1.0) * k + (-x0).exp() * log_ratio_integral(x0))
}

/// `∫_0^x e^y ln((1-y)/y) dy`.
fn log_ratio_integral(x: f64) -> f64 {
    const TOL: f64 = 1e-10;
    // ∫_0^x e^y ln y dy = ∫_0^{√x} 4 t ln t e^{t²} dt
    let log_y = adaptive_simpson(&|t: f64| 4.0 * xlogx(t) * (t * t).exp(), 0.0, x.sqrt(), TOL);
    // ∫_0^x e^y ln(1-y) dy = ∫_{√(1-x)}^1 4 s ln s e^{1-s²} ds
    let log_1my = adaptive_simpson(
        &|s: f64| 4.0 * xlogx(s) * (1.0 - s * s).exp(),
        (1.0 - x).sqrt(),
        1.0,
        TOL,
    );
    log_1my - log_y
}
