//! Path simulation, Monte Carlo ensembles, stochastic integrals and
//! verification of candidate solutions.

mod ensemble;
mod integrals;
mod noise;
mod path;
mod scheme;
mod solutions;

pub use ensemble::{ensemble, ensemble_with_tolerance, mean_and_se, pairwise_sum, EnsembleStats};
pub use integrals::{
    ito_integral, ito_integral_cumulative, stratonovich_integral,
    stratonovich_integral_cumulative, trapezoid_cumulative,
};
pub use noise::{brownian_path, coarsen, FixedIncrements, GaussianStream, NoiseSource};
pub use path::Path;
pub use scheme::{
    absorption_tolerance, simulate, simulate_ito, simulate_ito_with_tolerance,
    simulate_stratonovich,
};
pub use solutions::{
    bessel_closed_form, constant_path, residual_profile, shifted_family, sign_change_index,
    truncated_family, verify_solution, verify_tolerance,
};
