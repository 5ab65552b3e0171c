//! Checking candidate paths against the integral equation, and the explicit
//! solutions of the Stratonovich equation `dX = sqrt(2X) ∘ dW`.

use crate::coefficients::{DiffusionSpec, Interpretation};
use crate::error::{Error, Result};

use super::integrals::{
    ito_integral_cumulative, stratonovich_integral_cumulative, trapezoid_cumulative,
};
use super::path::Path;

/// Pass threshold `5 dt^0.4` for residuals of square-root integrands.
pub fn verify_tolerance(dt: f64) -> f64 {
    5.0 * dt.powf(0.4)
}

/// `|X_t - x0 - ∫ f ds - ∫ sqrt(2g) dW|` at every node, using the stochastic
/// integral that matches the spec's interpretation and trapezoid drift sums.
pub fn residual_profile(s: &DiffusionSpec, candidate: &Path) -> Result<Vec<f64>> {
    let n = candidate.len();
    if n == 0 || candidate.driving_noise.len() != n || candidate.times.len() != n {
        return Err(Error::LengthMismatch(n, candidate.driving_noise.len()));
    }
    let mut drift = Vec::with_capacity(n);
    let mut sigma = Vec::with_capacity(n);
    for &x in &candidate.states {
        drift.push(s.drift(x)?);
        sigma.push(s.sigma(x)?);
    }
    let drift_int = trapezoid_cumulative(&drift, candidate.dt());
    let noise_int = match s.interpretation {
        Interpretation::Ito => ito_integral_cumulative(&sigma, &candidate.driving_noise)?,
        Interpretation::Stratonovich => {
            stratonovich_integral_cumulative(&sigma, &candidate.driving_noise)?
        }
    };
    let x0 = candidate.x0();
    Ok(candidate
        .states
        .iter()
        .zip(drift_int.iter().zip(&noise_int))
        .map(|(x, (d, w))| (x - x0 - d - w).abs())
        .collect())
}

/// Largest entry of [`residual_profile`].
pub fn verify_solution(s: &DiffusionSpec, candidate: &Path) -> Result<f64> {
    Ok(residual_profile(s, candidate)?.into_iter().fold(0.0, f64::max))
}

/// `X ≡ x` driven by `w`.
pub fn constant_path(x: f64, w: &[f64], dt: f64) -> Path {
    Path::on_grid(dt, vec![x; w.len()], w.to_vec())
}

/// `X_t = (sqrt(x0) + W_t/√2)²` evaluated along `w`.
pub fn bessel_closed_form(x0: f64, w: &[f64], dt: f64) -> Result<Path> {
    if x0 < 0.0 {
        return Err(Error::Domain(format!("x0 = {x0} < 0")));
    }
    let states = w.iter().map(|&wt| pre_image(x0, wt).powi(2)).collect();
    Ok(Path::on_grid(dt, states, w.to_vec()))
}

fn pre_image(x0: f64, w: f64) -> f64 {
    x0.sqrt() + w / std::f64::consts::SQRT_2
}

/// Index of the `n`-th grid node (1-based) at which `sqrt(x0) + W/√2` changes
/// sign relative to the previous node; landing exactly on zero counts.
pub fn sign_change_index(x0: f64, w: &[f64], n: usize) -> Option<usize> {
    let ys: Vec<f64> = w.iter().map(|&wt| pre_image(x0, wt)).collect();
    ys.windows(2)
        .enumerate()
        .filter(|(_, p)| p[1] == 0.0 || (p[0] > 0.0) != (p[1] > 0.0))
        .map(|(k, _)| k + 1)
        .nth(n.checked_sub(1)?)
}

/// Closed form stopped at the `n`-th sign change `T_n` and held at zero
/// afterwards: `X_t = (sqrt(x0) + W_t/√2)² · 1{t < T_n}`.
pub fn truncated_family(x0: f64, w: &[f64], dt: f64, n: usize) -> Result<Path> {
    let stop = sign_change_index(x0, w, n).ok_or_else(|| {
        Error::Precondition(format!("the noise path has fewer than {n} sign changes"))
    })?;
    let mut path = bessel_closed_form(x0, w, dt)?;
    for x in &mut path.states[stop..] {
        *x = 0.0;
    }
    Ok(path)
}

/// Shifted solution from zero: `X_t = W_{t-τ}²/2 · 1{t > τ}`, driven by the
/// shifted noise `W_{t-τ}` with `W_s = 0` for `s < 0`.
///
/// `w` is the unshifted Brownian path on the same grid; `τ` is rounded to the
/// nearest node.
pub fn shifted_family(w: &[f64], dt: f64, tau: f64) -> Result<Path> {
    if tau < 0.0 {
        return Err(Error::Precondition(format!("tau = {tau} < 0")));
    }
    let shift = ((tau / dt).round() as usize).min(w.len());
    let shifted: Vec<f64> = (0..w.len())
        .map(|k| if k < shift { 0.0 } else { w[k - shift] })
        .collect();
    let states = shifted.iter().map(|v| 0.5 * v * v).collect();
    Ok(Path::on_grid(dt, states, shifted))
}
