//! Formal Itô ↔ Stratonovich drift transformation and the audit of trivial
//! (absorbing-state) solutions it destroys or creates.
//!
//! For `dX = f dt + sqrt(2g) dW` the two forms differ by `½ g'` in the drift:
//! Itô `f` corresponds to Stratonovich `f - ½g'`. Where `f(x*) = g(x*) = 0` the
//! constant path `X ≡ x*` solves the source equation, but the transformed drift
//! at `x*` is `∓½ g'(x*)`, which is non-zero unless `g'(x*) = 0`.

use serde::{Deserialize, Serialize};

use crate::coefficients::{
    differentiate, equivalent, expr_text, simplify, DiffusionSpec, Expr, Interpretation,
};
use crate::error::{Error, Result};

/// A point is trivial for a spec when `|f| <= TRIVIAL_TOL` and `|g| <= TRIVIAL_TOL`.
pub const TRIVIAL_TOL: f64 = 1e-12;
/// Fixed points closer than this are merged.
const MERGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WarningKind {
    /// `g'(x*) = 0` at a common root; the point is left out of destroyed/created.
    DegenerateSlope,
    /// `f = g = 0` on a run of grid nodes; roots are not isolated.
    NonIsolated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditWarning {
    pub x: f64,
    pub kind: WarningKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Audit {
    pub fixed_points_source: Vec<f64>,
    pub fixed_points_target: Vec<f64>,
    pub destroyed: Vec<f64>,
    pub created: Vec<f64>,
    pub warnings: Vec<AuditWarning>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformReport {
    pub source: DiffusionSpec,
    pub target: DiffusionSpec,
    /// Signed term added to the source drift: `-½g'` or `+½g'`.
    #[serde(with = "expr_text")]
    pub correction: Expr,
    pub fixed_points_source: Vec<f64>,
    pub fixed_points_target: Vec<f64>,
    pub destroyed: Vec<f64>,
    pub created: Vec<f64>,
    pub warnings: Vec<AuditWarning>,
}

pub fn ito_to_stratonovich(s: &DiffusionSpec) -> Result<TransformReport> {
    s.require(Interpretation::Ito)?;
    transform(s, -1.0)
}

pub fn stratonovich_to_ito(s: &DiffusionSpec) -> Result<TransformReport> {
    s.require(Interpretation::Stratonovich)?;
    transform(s, 1.0)
}

/// Applies whichever direction matches the spec's interpretation.
pub fn to_dual(s: &DiffusionSpec) -> Result<TransformReport> {
    match s.interpretation {
        Interpretation::Ito => ito_to_stratonovich(s),
        Interpretation::Stratonovich => stratonovich_to_ito(s),
    }
}

fn transform(s: &DiffusionSpec, sign: f64) -> Result<TransformReport> {
    let half_gprime = simplify(&Expr::mul(Expr::num(0.5), differentiate(&s.g)));
    let (correction, f) = if sign < 0.0 {
        (
            simplify(&Expr::neg(half_gprime.clone())),
            simplify(&Expr::sub(s.f.clone(), half_gprime)),
        )
    } else {
        (
            half_gprime.clone(),
            simplify(&Expr::add(s.f.clone(), half_gprime)),
        )
    };
    let target = DiffusionSpec::new(f, s.g.clone(), s.domain, s.interpretation.dual());
    let audit = absorbing_state_audit(s, &target)?;
    Ok(TransformReport {
        source: s.clone(),
        target,
        correction,
        fixed_points_source: audit.fixed_points_source,
        fixed_points_target: audit.fixed_points_target,
        destroyed: audit.destroyed,
        created: audit.created,
        warnings: audit.warnings,
    })
}

/// Compares the trivial solutions of two specs sharing `g` and the domain.
pub fn absorbing_state_audit(source: &DiffusionSpec, target: &DiffusionSpec) -> Result<Audit> {
    if source.domain != target.domain {
        return Err(Error::Precondition(format!(
            "audit needs a common domain, got {} and {}",
            source.domain, target.domain
        )));
    }
    if !equivalent(&source.g, &target.g) {
        return Err(Error::Precondition(format!(
            "audit needs a common g, got `{}` and `{}`",
            source.g, target.g
        )));
    }
    let gp = differentiate(&source.g);
    let src = trivial_points(source);
    let tgt = trivial_points(target);

    let mut warnings: Vec<AuditWarning> = Vec::new();
    let mut push_warning = |x: f64, kind: WarningKind| {
        if !warnings.iter().any(|w| w.kind == kind && (w.x - x).abs() <= MERGE_TOL) {
            warnings.push(AuditWarning { x, kind });
        }
    };
    for &x in src.non_isolated.iter().chain(&tgt.non_isolated) {
        push_warning(x, WarningKind::NonIsolated);
    }
    let slope_ok = |x: f64| gp.eval(x).map(|d| d.abs() > TRIVIAL_TOL).unwrap_or(false);
    for &x in src.points.iter().chain(&tgt.points) {
        if !slope_ok(x) {
            push_warning(x, WarningKind::DegenerateSlope);
        }
    }

    let contains = |set: &[f64], x: f64| set.iter().any(|y| (y - x).abs() <= MERGE_TOL);
    let destroyed = src
        .points
        .iter()
        .copied()
        .filter(|&x| !contains(&tgt.points, x) && slope_ok(x))
        .collect();
    let created = tgt
        .points
        .iter()
        .copied()
        .filter(|&x| !contains(&src.points, x) && slope_ok(x))
        .collect();

    Ok(Audit {
        fixed_points_source: src.points,
        fixed_points_target: tgt.points,
        destroyed,
        created,
        warnings,
    })
}

/// Result of the root scan for common zeros of `f` and `g`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrivialPoints {
    pub points: Vec<f64>,
    /// Starts of runs of consecutive grid nodes that are all trivial.
    pub non_isolated: Vec<f64>,
}

/// Points `x*` in the domain where the constant path `X ≡ x*` solves the SDE,
/// i.e. `f(x*) = g(x*) = 0`.
///
/// Candidates are exact zeros on the validation grid, sign changes of `f` or
/// `g` refined by bisection, and local minima of `|f|`/`|g|` refined by
/// golden-section search (for touching roots). A candidate is kept when both
/// `|f|` and `|g|` are within [`TRIVIAL_TOL`] there.
pub fn trivial_points(s: &DiffusionSpec) -> TrivialPoints {
    let grid = s.domain.validation_grid();
    let is_trivial = |x: f64| match (s.f.eval(x), s.g.eval(x)) {
        (Ok(f), Ok(g)) => f.abs() <= TRIVIAL_TOL && g.abs() <= TRIVIAL_TOL,
        _ => false,
    };

    let mut candidates = Vec::new();
    for coeff in [&s.f, &s.g] {
        let eval = |x: f64| coeff.eval(x).unwrap_or(f64::NAN);
        let vals: Vec<f64> = grid.iter().map(|&x| eval(x)).collect();
        for i in 0..grid.len() {
            let v = vals[i];
            if v.abs() <= TRIVIAL_TOL {
                candidates.push(grid[i]);
                continue;
            }
            if i + 1 < grid.len() {
                let w = vals[i + 1];
                if v.is_finite() && w.is_finite() && w.abs() > TRIVIAL_TOL && v.signum() != w.signum()
                {
                    candidates.push(bisect(&eval, grid[i], grid[i + 1]));
                }
            }
            if i > 0 && i + 1 < grid.len() {
                let (l, r) = (vals[i - 1].abs(), vals[i + 1].abs());
                if v.abs() < l && v.abs() <= r {
                    candidates.push(golden_min(|x| eval(x).abs(), grid[i - 1], grid[i + 1]));
                }
            }
        }
    }

    candidates.retain(|&x| s.domain.contains(x) && is_trivial(x));
    candidates.sort_by(f64::total_cmp);
    candidates.dedup_by(|a, b| (*a - *b).abs() <= MERGE_TOL);

    let mut non_isolated = Vec::new();
    let on_grid: Vec<bool> = grid.iter().map(|&x| is_trivial(x)).collect();
    let mut i = 0;
    while i < on_grid.len() {
        if on_grid[i] {
            let start = i;
            while i < on_grid.len() && on_grid[i] {
                i += 1;
            }
            if i - start >= 3 {
                non_isolated.push(grid[start]);
            }
        } else {
            i += 1;
        }
    }

    TrivialPoints {
        points: candidates,
        non_isolated,
    }
}

fn bisect(phi: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = phi(lo);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = phi(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    if phi(lo).abs() <= phi(hi).abs() {
        lo
    } else {
        hi
    }
}

fn golden_min(phi: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (phi(c), phi(d));
    for _ in 0..200 {
        if hi - lo <= 1e-15 * lo.abs().max(1.0) {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = phi(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = phi(d);
        }
    }
    0.5 * (lo + hi)
}
