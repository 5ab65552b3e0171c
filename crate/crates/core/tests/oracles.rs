//! Closed-form checks through the public API.

use approx::assert_relative_eq;

use itostrat::{
    boundary_report, classify_boundary, feller_exit_time, ito_to_stratonovich, logistic_mean_time,
    solve_mean_absorption_time, BoundaryClass, BoundaryConditions, DiffusionSpec, Interpretation,
    IntegralVerdict,
};

fn ito(f: &str, g: &str, domain: &str) -> DiffusionSpec {
    DiffusionSpec::parse(f, g, domain.parse().unwrap(), Interpretation::Ito).unwrap()
}

#[test]
fn square_root_diffusions_at_zero() {
    // dX = c dt + sqrt(2X) dW: absorbing for c = 0, reflecting for 0 < c < 1,
    // unreachable for c >= 1.
    let cases = [
        ("0", BoundaryClass::AccessibleAbsorbing, IntegralVerdict::Finite),
        ("1/2", BoundaryClass::AccessibleReflecting, IntegralVerdict::Finite),
        ("1", BoundaryClass::Inaccessible, IntegralVerdict::Divergent),
        ("2", BoundaryClass::Inaccessible, IntegralVerdict::Divergent),
    ];
    for (c, class, verdict) in cases {
        let s = ito(c, "x", "[0, inf)");
        assert_eq!(classify_boundary(&s, 0.0).unwrap(), class, "c = {c}");
        let r = boundary_report(&s, 0.0).unwrap();
        assert_eq!(r.integral_verdict, verdict, "c = {c}");
        assert!(r.agreement);
    }
}

#[test]
fn feller_loses_its_absorbing_state_under_stratonovich() {
    let r = ito_to_stratonovich(&ito("0", "x", "[0, inf)")).unwrap();
    assert_eq!(r.destroyed, vec![0.0]);
    assert_relative_eq!(r.target.f.eval(3.0).unwrap(), -0.5);
}

#[test]
fn logistic_and_exit_times() {
    let s = ito("0", "x*(1-x)", "[0, 1]");
    let sol = solve_mean_absorption_time(&s, 999, BoundaryConditions::auto()).unwrap();
    for x in [0.1, 0.25, 0.5, 0.9] {
        assert_relative_eq!(
            sol.value_at(x).unwrap(),
            logistic_mean_time(x).unwrap(),
            epsilon = 1e-5
        );
    }
    let m = 10.0;
    let s = ito("0", "x", "[0, 10]");
    let sol = solve_mean_absorption_time(&s, 199, BoundaryConditions::auto()).unwrap();
    assert_relative_eq!(
        sol.value_at(1.0).unwrap(),
        feller_exit_time(1.0, m).unwrap(),
        max_relative = 1e-6
    );
    assert_relative_eq!(feller_exit_time(1.0, m).unwrap(), m.ln(), max_relative = 1e-12);
}
