//! Fixtures shared by the benchmarks.

use itostrat::{DiffusionSpec, Interpretation};

/// Itô spec from text; panics on malformed input.
pub fn ito(f: &str, g: &str, domain: &str) -> DiffusionSpec {
    DiffusionSpec::parse(f, g, domain.parse().expect("domain"), Interpretation::Ito)
        .expect("spec")
}

pub fn feller() -> DiffusionSpec {
    ito("0", "x", "[0, inf)")
}

pub fn logistic() -> DiffusionSpec {
    ito("0", "x*(1-x)", "[0, 1]")
}

pub fn logistic_drift() -> DiffusionSpec {
    ito("x - x^2", "x - x^2", "[0, 1]")
}
