//! Euler–Maruyama (Itô) and Heun (Stratonovich) steppers with full truncation.

use crate::boundary::{classify_boundary, BoundaryClass};
use crate::coefficients::{validate_spec, DiffusionSpec, Interpretation, DEGENERACY_TOL};
use crate::error::{Error, Result};

use super::noise::NoiseSource;
use super::path::Path;

/// Distance from an absorbing degenerate endpoint below which an Itô path is
/// declared absorbed: `2 |g'(a)| dt`.
///
/// Near the endpoint `g ≈ g'(a) (x - a)`, so from `x = 2 g'(a) dt` one
/// Euler step has noise standard deviation `2 g'(a) dt`, comparable to the
/// distance left. Larger thresholds visibly shorten the absorption times.
pub fn absorption_tolerance(gprime: f64, dt: f64) -> f64 {
    2.0 * gprime.abs() * dt
}

/// Endpoint at which paths stop, with its capture distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Trap {
    pub endpoint: f64,
    pub tol: f64,
}

/// One step of either scheme, plus the absorption rule.
pub(crate) struct Stepper<'a> {
    spec: &'a DiffusionSpec,
    lo: f64,
    hi: f64,
    pub traps: Vec<Trap>,
}

impl<'a> Stepper<'a> {
    /// For Itô specs, absorbing degenerate endpoints trap within
    /// [`absorption_tolerance`]` · tol_scale` and non-degenerate finite
    /// endpoints are exits. For Stratonovich specs every finite endpoint
    /// traps on contact; only first-passage statistics use that.
    pub fn new(spec: &'a DiffusionSpec, dt: f64, tol_scale: f64) -> Result<Self> {
        let mut traps = Vec::new();
        for (e, _) in spec.domain.endpoints() {
            let degenerate = spec.g_at(e)?.abs() <= DEGENERACY_TOL;
            let tol = match spec.interpretation {
                Interpretation::Stratonovich => 0.0,
                Interpretation::Ito if !degenerate => 0.0,
                // Endpoints the classifier rejects (e.g. g' = 0) are only clamped.
                Interpretation::Ito => match classify_boundary(spec, e) {
                    Ok(BoundaryClass::AccessibleAbsorbing) => {
                        tol_scale * absorption_tolerance(spec.g_prime().eval(e)?, dt)
                    }
                    _ => continue,
                },
            };
            traps.push(Trap { endpoint: e, tol });
        }
        Ok(Stepper {
            spec,
            lo: spec.domain.a,
            hi: spec.domain.b.unwrap_or(f64::INFINITY),
            traps,
        })
    }

    fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    /// Next state, clamped to the closed state space.
    #[inline]
    pub fn step(&self, x: f64, dw: f64, dt: f64) -> Result<f64> {
        let f = self.spec.drift(x)?;
        let sigma = self.spec.sigma(x)?;
        let next = match self.spec.interpretation {
            Interpretation::Ito => x + f * dt + sigma * dw,
            Interpretation::Stratonovich => {
                let predictor = self.clamp(x + f * dt + sigma * dw);
                let sigma_p = self.spec.sigma(predictor)?;
                x + f * dt + 0.5 * (sigma + sigma_p) * dw
            }
        };
        if next.is_finite() {
            Ok(self.clamp(next))
        } else {
            Err(Error::Precondition(format!("path blew up stepping from x = {x}")))
        }
    }

    /// Endpoint that captures `x`, if any.
    #[inline]
    pub fn trapped(&self, x: f64) -> Option<f64> {
        self.traps
            .iter()
            .find(|t| (x - t.endpoint).abs() <= t.tol)
            .map(|t| t.endpoint)
    }
}

/// `g >= 0` and inward drift at every finite endpoint.
pub(crate) fn check_simulable(s: &DiffusionSpec) -> Result<()> {
    let report = validate_spec(s);
    let mut failures = Vec::new();
    if !report.g_nonnegative {
        failures.push("g is negative somewhere in the domain".to_string());
    }
    for c in report.compatibility.iter().filter(|c| !c.compatible) {
        failures.push(format!("drift points outward at endpoint {}", c.endpoint));
    }
    if !report.eval_errors.is_empty() {
        failures.push(report.eval_errors.join("; "));
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Error::Hypotheses(failures.join("; ")))
    }
}

pub(crate) fn check_grid(s: &DiffusionSpec, x0: f64, dt: f64, horizon: f64) -> Result<usize> {
    if !(dt > 0.0 && dt < horizon && horizon.is_finite()) {
        return Err(Error::Precondition(format!(
            "need 0 < dt < horizon, got dt = {dt}, horizon = {horizon}"
        )));
    }
    if !s.domain.contains(x0) {
        return Err(Error::Domain(format!("x0 = {x0} is outside {}", s.domain)));
    }
    Ok((horizon / dt).round() as usize)
}

/// Euler–Maruyama with full truncation; the path freezes at an absorbing
/// endpoint once it comes within the capture distance.
pub fn simulate_ito(
    s: &DiffusionSpec,
    x0: f64,
    dt: f64,
    horizon: f64,
    noise: &mut impl NoiseSource,
) -> Result<Path> {
    simulate_ito_with_tolerance(s, x0, dt, horizon, noise, 1.0)
}

/// [`simulate_ito`] with the capture distance scaled by `tol_scale`.
pub fn simulate_ito_with_tolerance(
    s: &DiffusionSpec,
    x0: f64,
    dt: f64,
    horizon: f64,
    noise: &mut impl NoiseSource,
    tol_scale: f64,
) -> Result<Path> {
    s.require(Interpretation::Ito)?;
    check_simulable(s)?;
    let n = check_grid(s, x0, dt, horizon)?;
    let stepper = Stepper::new(s, dt, tol_scale)?;
    run(&stepper, x0, dt, n, noise, true)
}

/// Heun predictor–corrector with full truncation; no absorption freezing.
pub fn simulate_stratonovich(
    s: &DiffusionSpec,
    x0: f64,
    dt: f64,
    horizon: f64,
    noise: &mut impl NoiseSource,
) -> Result<Path> {
    s.require(Interpretation::Stratonovich)?;
    let n = check_grid(s, x0, dt, horizon)?;
    let stepper = Stepper::new(s, dt, 1.0)?;
    run(&stepper, x0, dt, n, noise, false)
}

/// Dispatches on the spec's interpretation.
pub fn simulate(
    s: &DiffusionSpec,
    x0: f64,
    dt: f64,
    horizon: f64,
    noise: &mut impl NoiseSource,
) -> Result<Path> {
    match s.interpretation {
        Interpretation::Ito => simulate_ito(s, x0, dt, horizon, noise),
        Interpretation::Stratonovich => simulate_stratonovich(s, x0, dt, horizon, noise),
    }
}

fn run(
    stepper: &Stepper<'_>,
    x0: f64,
    dt: f64,
    n: usize,
    noise: &mut impl NoiseSource,
    freeze: bool,
) -> Result<Path> {
    let mut states = Vec::with_capacity(n + 1);
    let mut w = Vec::with_capacity(n + 1);
    let mut absorbed_at = None;
    let mut x = x0;
    let mut wk = 0.0;
    if freeze {
        if let Some(e) = stepper.trapped(x) {
            x = e;
            absorbed_at = Some((0, e));
        }
    }
    states.push(x);
    w.push(0.0);
    for k in 1..=n {
        let dw = noise.increment(dt).ok_or_else(|| {
            Error::Precondition(format!("noise source exhausted after {} steps", k - 1))
        })?;
        wk += dw;
        if absorbed_at.is_none() {
            x = stepper.step(x, dw, dt)?;
            if freeze {
                if let Some(e) = stepper.trapped(x) {
                    x = e;
                    absorbed_at = Some((k, e));
                }
            }
        }
        states.push(x);
        w.push(wk);
    }
    let mut path = Path::on_grid(dt, states, w);
    path.absorbed_at = absorbed_at;
    Ok(path)
}
