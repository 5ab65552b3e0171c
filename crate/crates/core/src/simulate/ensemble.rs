//! Monte Carlo absorption statistics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coefficients::{DiffusionSpec, Interpretation};
use crate::error::{Error, Result};

use super::noise::{GaussianStream, NoiseSource};
use super::scheme::{check_grid, check_simulable, Stepper};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub n_paths: usize,
    pub n_absorbed: usize,
    pub absorption_probability: f64,
    pub absorption_probability_se: f64,
    /// Mean over absorbed paths; `None` when no path was absorbed.
    pub mean_absorption_time: Option<f64>,
    pub mean_absorption_time_se: Option<f64>,
    pub seed: u64,
    pub dt: f64,
    pub horizon: f64,
}

/// Runs `n_paths` paths with noise stream `i` for path `i` and aggregates
/// absorption statistics.
///
/// For Itô specs a path is absorbed when it is captured by an absorbing
/// endpoint or leaves through a non-degenerate one. Stratonovich paths are
/// never frozen, so for them "absorbed" means first contact with an endpoint.
/// Results are collected by path index and summed pairwise, so they are
/// bit-identical for any thread count.
pub fn ensemble(
    s: &DiffusionSpec,
    x0: f64,
    n_paths: usize,
    dt: f64,
    horizon: f64,
    seed: u64,
) -> Result<EnsembleStats> {
    ensemble_with_tolerance(s, x0, n_paths, dt, horizon, seed, 1.0)
}

/// [`ensemble`] with the Itô capture distance scaled by `tol_scale`.
pub fn ensemble_with_tolerance(
    s: &DiffusionSpec,
    x0: f64,
    n_paths: usize,
    dt: f64,
    horizon: f64,
    seed: u64,
    tol_scale: f64,
) -> Result<EnsembleStats> {
    if n_paths == 0 {
        return Err(Error::Precondition("need at least one path".into()));
    }
    if s.interpretation == Interpretation::Ito {
        check_simulable(s)?;
    }
    let n_steps = check_grid(s, x0, dt, horizon)?;
    let stepper = Stepper::new(s, dt, tol_scale)?;

    let times: Vec<Option<f64>> = (0..n_paths)
        .into_par_iter()
        .map(|i| first_passage(&stepper, x0, dt, n_steps, &mut GaussianStream::new(seed, i as u64)))
        .collect::<Result<_>>()?;

    let absorbed: Vec<f64> = times.iter().flatten().copied().collect();
    let n_absorbed = absorbed.len();
    let p = n_absorbed as f64 / n_paths as f64;
    let p_se = if n_paths > 1 {
        (p * (1.0 - p) / (n_paths - 1) as f64).sqrt()
    } else {
        0.0
    };
    let (mean, mean_se) = match mean_and_se(&absorbed) {
        Some((m, se)) => (Some(m), Some(se)),
        None => (None, None),
    };
    Ok(EnsembleStats {
        n_paths,
        n_absorbed,
        absorption_probability: p,
        absorption_probability_se: p_se,
        mean_absorption_time: mean,
        mean_absorption_time_se: mean_se,
        seed,
        dt,
        horizon,
    })
}

/// Time of capture, or `None` if the path survives to the horizon. Stores
/// nothing but the current state.
fn first_passage(
    stepper: &Stepper<'_>,
    x0: f64,
    dt: f64,
    n_steps: usize,
    noise: &mut impl NoiseSource,
) -> Result<Option<f64>> {
    if stepper.trapped(x0).is_some() {
        return Ok(Some(0.0));
    }
    let mut x = x0;
    for k in 1..=n_steps {
        let dw = noise.increment(dt).unwrap_or(0.0);
        x = stepper.step(x, dw, dt)?;
        if stepper.trapped(x).is_some() {
            return Ok(Some(k as f64 * dt));
        }
    }
    Ok(None)
}

/// Sample mean and `sample std / √n`.
pub fn mean_and_se(xs: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len();
    if n == 0 {
        return None;
    }
    let mean = pairwise_sum(xs) / n as f64;
    if n == 1 {
        return Some((mean, 0.0));
    }
    let sq: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1) as f64;
    Some((mean, (var / n as f64).sqrt()))
}

/// Recursive pairwise summation in index order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 64;
    if xs.len() <= BLOCK {
        xs.iter().sum()
    } else {
        let (l, r) = xs.split_at(xs.len() / 2);
        pairwise_sum(l) + pairwise_sum(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ito(f: &str, g: &str, domain: &str) -> DiffusionSpec {
        DiffusionSpec::parse(f, g, domain.parse().unwrap(), Interpretation::Ito).unwrap()
    }

    #[test]
    fn bit_identical_across_runs_and_thread_counts() {
        let s = ito("0", "x*(1-x)", "[0, 1]");
        let a = ensemble(&s, 0.5, 200, 1e-3, 5.0, 42).unwrap();
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap()
            .install(|| ensemble(&s, 0.5, 200, 1e-3, 5.0, 42).unwrap());
        assert_eq!(a, b);
        let c = ensemble(&s, 0.5, 200, 1e-3, 5.0, 43).unwrap();
        assert_ne!(a.mean_absorption_time, c.mean_absorption_time);
    }

    #[test]
    fn starting_on_an_absorbing_endpoint() {
        let s = ito("x - x^2", "x - x^2", "[0, 1]");
        for x0 in [0.0, 1.0] {
            let st = ensemble(&s, x0, 10, 1e-3, 1.0, 1).unwrap();
            assert_eq!(st.absorption_probability, 1.0);
            assert_eq!(st.mean_absorption_time, Some(0.0));
            assert_eq!(st.absorption_probability_se, 0.0);
        }
    }

    #[test]
    fn feller_extinction_probability_grows_with_horizon() {
        // P(absorbed by t) = exp(-x0/t) for dX = sqrt(2X) dW
        let s = ito("0", "x", "[0, inf)");
        let mut last = 0.0;
        for horizon in [0.5, 2.0, 8.0] {
            let st = ensemble(&s, 1.0, 2000, 1e-3, horizon, 7).unwrap();
            let exact = (-1.0 / horizon).exp();
            let p = st.absorption_probability;
            assert!((p - exact).abs() < 4.0 * st.absorption_probability_se + 0.02, "{horizon}: {p} vs {exact}");
            assert!(p > last);
            last = p;
        }
    }

    #[test]
    fn statistics_helpers() {
        assert_eq!(mean_and_se(&[]), None);
        let (m, se) = mean_and_se(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(m, 2.0);
        assert!((se - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        let xs: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 499_500.0);
    }

    #[test]
    fn needs_paths() {
        assert!(ensemble(&ito("0", "x", "[0, inf)"), 1.0, 0, 0.1, 1.0, 0).is_err());
    }
}
