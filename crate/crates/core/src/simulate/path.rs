//! Sample paths on a uniform time grid.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub times: Vec<f64>,
    pub states: Vec<f64>,
    /// `W` at each node, `W_0 = 0`.
    pub driving_noise: Vec<f64>,
    /// `(index, endpoint)` of the first node at which the path was absorbed.
    pub absorbed_at: Option<(usize, f64)>,
}

impl Path {
    /// Path on the grid `t_k = k·dt`.
    pub fn on_grid(dt: f64, states: Vec<f64>, driving_noise: Vec<f64>) -> Path {
        let times = (0..states.len()).map(|k| k as f64 * dt).collect();
        Path {
            times,
            states,
            driving_noise,
            absorbed_at: None,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dt(&self) -> f64 {
        if self.times.len() < 2 {
            0.0
        } else {
            self.times[1] - self.times[0]
        }
    }

    pub fn x0(&self) -> f64 {
        self.states[0]
    }

    pub fn final_state(&self) -> f64 {
        *self.states.last().expect("non-empty path")
    }

    /// `max_k |X_k - Y_k|` over the common prefix.
    pub fn sup_distance(&self, other: &Path) -> f64 {
        self.states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Columns `t,W,X,absorbed`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,W,X,absorbed\n");
        let from = self.absorbed_at.map_or(usize::MAX, |(k, _)| k);
        for (k, ((t, w), x)) in self
            .times
            .iter()
            .zip(&self.driving_noise)
            .zip(&self.states)
            .enumerate()
        {
            let _ = writeln!(out, "{t},{w},{x},{}", u8::from(k >= from));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_flags_absorbed_nodes() {
        let mut p = Path::on_grid(0.5, vec![1.0, 0.0, 0.0], vec![0.0, -1.0, -2.0]);
        p.absorbed_at = Some((1, 0.0));
        assert_eq!(p.to_csv(), "t,W,X,absorbed\n0,0,1,0\n0.5,-1,0,1\n1,-2,0,1\n");
        assert_eq!(p.dt(), 0.5);
        assert_eq!(p.final_state(), 0.0);
    }
}
