//! Brownian increments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Supplies Brownian increments `ΔW` over steps of length `dt`.
pub trait NoiseSource {
    /// `None` once the source is exhausted.
    fn increment(&mut self, dt: f64) -> Option<f64>;
}

/// Gaussian increments from ChaCha8 keyed by `(seed, stream)`.
///
/// Each stream is an independent keystream, so path `i` of an ensemble draws
/// the same numbers no matter which thread runs it or in what order.
#[derive(Debug, Clone)]
pub struct GaussianStream {
    rng: ChaCha8Rng,
}

impl GaussianStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        GaussianStream { rng }
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }
}

impl NoiseSource for GaussianStream {
    fn increment(&mut self, dt: f64) -> Option<f64> {
        Some(dt.sqrt() * self.standard_normal())
    }
}

/// Replays prescribed increments, e.g. from a stored Brownian path.
#[derive(Debug, Clone)]
pub struct FixedIncrements {
    increments: Vec<f64>,
    pos: usize,
}

impl FixedIncrements {
    pub fn new(increments: Vec<f64>) -> Self {
        FixedIncrements { increments, pos: 0 }
    }

    /// Increments of `w` between consecutive grid nodes.
    pub fn from_path(w: &[f64]) -> Self {
        Self::new(w.windows(2).map(|p| p[1] - p[0]).collect())
    }
}

impl NoiseSource for FixedIncrements {
    fn increment(&mut self, _dt: f64) -> Option<f64> {
        let v = self.increments.get(self.pos).copied();
        self.pos += 1;
        v
    }
}

/// `W` at `n_steps + 1` grid nodes, starting from `W_0 = 0`.
pub fn brownian_path(noise: &mut impl NoiseSource, n_steps: usize, dt: f64) -> Vec<f64> {
    let mut w = Vec::with_capacity(n_steps + 1);
    w.push(0.0);
    let mut acc = 0.0;
    for _ in 0..n_steps {
        acc += noise.increment(dt).unwrap_or(0.0);
        w.push(acc);
    }
    w
}

/// Keeps every `factor`-th node.
pub fn coarsen(w: &[f64], factor: usize) -> Vec<f64> {
    w.iter().step_by(factor.max(1)).copied().collect()
}
