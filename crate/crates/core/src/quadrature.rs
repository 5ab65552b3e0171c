//! One-dimensional quadrature helpers.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;

/// 64-node Gauss–Legendre rule.
pub fn gauss_legendre_64() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(64).expect("non-zero")))
}

/// 8-node Gauss–Legendre rule, for short correction intervals.
pub fn gauss_legendre_8() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(8).expect("non-zero")))
}

/// Applies `rule` on `[a, b]` to a fallible integrand, stopping at the first error.
pub fn try_integrate<E>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    mut f: impl FnMut(f64) -> Result<f64, E>,
) -> Result<f64, E> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut sum = 0.0;
    for &(x, w) in rule.as_node_weight_pairs() {
        sum += w * f(mid + half * x)?;
    }
    Ok(half * sum)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Never evaluates more than `max_depth` levels of bisection; returns the best
/// estimate if the depth limit is hit.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    const MAX_DEPTH: u32 = 50;
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Running integral of tabulated values on a uniform grid with spacing `h`.
///
/// `out[k] ≈ ∫_{t_0}^{t_k}`. Even nodes use composite Simpson; odd nodes add a
/// cubic correction over the last interval, so the whole table is fourth order.
pub fn cumulative_simpson(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = 0.5 * h * (values[0] + values[1]);
        return out;
    }
    for k in (2..n).step_by(2) {
        out[k] = out[k - 2] + h / 3.0 * (values[k - 2] + 4.0 * values[k - 1] + values[k]);
    }
    // ∫ over [t_{k-1}, t_k] from the parabola through three neighbouring points
    for k in (1..n).step_by(2) {
        let piece = if k + 1 < n {
            h / 12.0 * (5.0 * values[k - 1] + 8.0 * values[k] - values[k + 1])
        } else {
            h / 12.0 * (-values[k - 2] + 8.0 * values[k - 1] + 5.0 * values[k])
        };
        out[k] = out[k - 1] + piece;
    }
    out
}
