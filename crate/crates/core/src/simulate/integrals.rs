//! Stochastic integrals from partial sums on a grid.

use crate::error::{Error, Result};

fn check(integrand: &[f64], w: &[f64]) -> Result<()> {
    if integrand.len() != w.len() {
        Err(Error::LengthMismatch(integrand.len(), w.len()))
    } else {
        Ok(())
    }
}

/// `Σ h_k (W_{k+1} - W_k)`: left-point sums.
pub fn ito_integral(integrand: &[f64], w: &[f64]) -> Result<f64> {
    check(integrand, w)?;
    Ok(integrand
        .iter()
        .zip(w.windows(2))
        .map(|(h, dw)| h * (dw[1] - dw[0]))
        .sum())
}

/// `Σ ½(h_k + h_{k+1}) (W_{k+1} - W_k)`.
///
/// With only node values available, the midpoint value of the integrand is
/// taken as the average of the two adjacent nodes.
pub fn stratonovich_integral(integrand: &[f64], w: &[f64]) -> Result<f64> {
    check(integrand, w)?;
    Ok(integrand
        .windows(2)
        .zip(w.windows(2))
        .map(|(h, dw)| 0.5 * (h[0] + h[1]) * (dw[1] - dw[0]))
        .sum())
}

/// Running Itô sums; `out[k]` integrates up to node `k`.
pub fn ito_integral_cumulative(integrand: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    check(integrand, w)?;
    Ok(running(integrand.windows(2).zip(w.windows(2)).map(|(h, dw)| h[0] * (dw[1] - dw[0]))))
}

/// Running Stratonovich sums; `out[k]` integrates up to node `k`.
pub fn stratonovich_integral_cumulative(integrand: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    check(integrand, w)?;
    Ok(running(
        integrand
            .windows(2)
            .zip(w.windows(2))
            .map(|(h, dw)| 0.5 * (h[0] + h[1]) * (dw[1] - dw[0])),
    ))
}

/// Running trapezoid rule `∫_0^{t_k} h dt` on a uniform grid.
pub fn trapezoid_cumulative(integrand: &[f64], dt: f64) -> Vec<f64> {
    running(integrand.windows(2).map(|h| 0.5 * (h[0] + h[1]) * dt))
}

fn running(pieces: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out = vec![0.0];
    let mut acc = 0.0;
    for p in pieces {
        acc += p;
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::noise::{brownian_path, GaussianStream};

    #[test]
    fn constant_integrand() {
        let w = [0.0, 0.3, -0.1, 0.4];
        let c = [2.0; 4];
        assert!((ito_integral(&c, &w).unwrap() - 0.8).abs() < 1e-15);
        assert!((stratonovich_integral(&c, &w).unwrap() - 0.8).abs() < 1e-15);
        assert!(ito_integral(&c[..3], &w).is_err());
        assert!(stratonovich_integral_cumulative(&c, &w[..2]).is_err());
    }

    #[test]
    fn w_dw_under_both_calculi() {
        let dt = 1e-5;
        let w = brownian_path(&mut GaussianStream::new(11, 0), 100_000, dt);
        let wt = *w.last().unwrap();
        // trapezoid sums telescope exactly to W_T²/2
        assert!((stratonovich_integral(&w, &w).unwrap() - 0.5 * wt * wt).abs() < 1e-12);
        // Itô: W_T²/2 - T/2, up to the quadratic-variation error O(√dt)
        assert!((ito_integral(&w, &w).unwrap() - (0.5 * wt * wt - 0.5)).abs() < 0.02);
    }

    #[test]
    fn cumulative_agrees_with_total() {
        let w = brownian_path(&mut GaussianStream::new(2, 0), 500, 1e-3);
        let h: Vec<f64> = w.iter().map(|x| x.sin()).collect();
        let cum = ito_integral_cumulative(&h, &w).unwrap();
        assert_eq!(cum.len(), w.len());
        assert!((cum[500] - ito_integral(&h, &w).unwrap()).abs() < 1e-12);
        let cum = stratonovich_integral_cumulative(&h, &w).unwrap();
        assert!((cum[500] - stratonovich_integral(&h, &w).unwrap()).abs() < 1e-12);
        let t = trapezoid_cumulative(&[1.0; 11], 0.1);
        assert!((t[10] - 1.0).abs() < 1e-12);
    }
}
