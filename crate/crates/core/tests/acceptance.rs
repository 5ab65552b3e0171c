//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`); exits non-zero if any
//! criterion fails.

use std::time::Instant;

use itostrat::boundary::{boundary_report, BoundaryClass};
use itostrat::coefficients::{equivalent, parse_expr, simplify, DiffusionSpec, Interpretation};
use itostrat::meantime::{
    drifted_logistic_mean_time, logistic_mean_time, solve_mean_absorption_time,
    BoundaryConditions, MeanTimeSolution,
};
use itostrat::simulate::{
    bessel_closed_form, brownian_path, coarsen, constant_path, ensemble, residual_profile,
    shifted_family, sign_change_index, simulate_stratonovich, truncated_family, verify_solution,
    verify_tolerance, FixedIncrements, GaussianStream, Path,
};
use itostrat::transform::ito_to_stratonovich;

const SEED: u64 = 42;

struct Outcome {
    pass: bool,
    detail: String,
}

fn spec(f: &str, g: &str, domain: &str, interp: Interpretation) -> DiffusionSpec {
    DiffusionSpec::parse(f, g, domain.parse().expect("domain"), interp).expect("spec")
}

fn ito(f: &str, g: &str, domain: &str) -> DiffusionSpec {
    spec(f, g, domain, Interpretation::Ito)
}

fn max_error(sol: &MeanTimeSolution, exact: impl Fn(f64) -> f64) -> f64 {
    sol.grid
        .iter()
        .zip(&sol.values)
        .map(|(&x, &t)| (t - exact(x)).abs())
        .fold(0.0, f64::max)
}

fn sci(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
}

fn criterion_1() -> Outcome {
    let feller = ito_to_stratonovich(&ito("0", "x", "[0, inf)")).expect("transform");
    let want_f = simplify(&parse_expr("-1/2").expect("parse"));
    let ok_feller = feller.target.f == want_f && feller.destroyed == vec![0.0];

    let logistic = ito_to_stratonovich(&ito("x - x^2", "x - x^2", "[0, 1]")).expect("transform");
    let want = parse_expr("-1/2 + 2*x - x^2").expect("parse");
    let ok_logistic =
        equivalent(&logistic.target.f, &want) && logistic.destroyed == vec![0.0, 1.0];
    Outcome {
        pass: ok_feller && ok_logistic,
        detail: format!(
            "(0,x) -> f = {}, destroyed {:?}; (x-x^2,x-x^2) -> f = {}, destroyed {:?}",
            feller.target.f, feller.destroyed, logistic.target.f, logistic.destroyed
        ),
    }
}

fn criterion_2() -> Outcome {
    let mut pass = true;
    let mut rows = Vec::new();
    for (g, gprime, domain) in [("x", "1", "[0, inf)"), ("x - x^2", "(1 - 2*x)", "[0, 1]")] {
        for (c, want) in [
            ("0", BoundaryClass::AccessibleAbsorbing),
            ("1/2", BoundaryClass::AccessibleReflecting),
            ("1", BoundaryClass::Inaccessible),
            ("2", BoundaryClass::Inaccessible),
        ] {
            let f = format!("{c}*{gprime}");
            let r = boundary_report(&ito(&f, g, domain), 0.0).expect("report");
            // f(a) = g'(a) separates accessible from inaccessible
            let threshold = c == "1";
            let ok = r.analytic_class == want && (threshold || r.agreement);
            pass &= ok;
            rows.push(format!(
                "{g}/f={f}: {:?} {:?}{}{}",
                r.analytic_class,
                r.integral_verdict,
                if threshold { " (threshold)" } else { "" },
                if ok { "" } else { " <-- mismatch" }
            ));
        }
    }
    Outcome {
        pass,
        detail: rows.join("; "),
    }
}

fn criterion_3() -> Outcome {
    let s = ito("0", "x*(1-x)", "[0, 1]");
    let solve = |n| solve_mean_absorption_time(&s, n, BoundaryConditions::auto()).expect("solve");
    let sol = solve(999);
    let err = max_error(&sol, |x| logistic_mean_time(x).expect("closed form"));
    let t_half = sol.value_at(0.5).expect("in range");
    let ok_values = err <= 1e-5 && (t_half - std::f64::consts::LN_2).abs() <= 1e-5;

    let ns = [249usize, 499, 999];
    let errs: Vec<f64> = ns
        .iter()
        .map(|&n| max_error(&solve(n), |x| logistic_mean_time(x).expect("closed form")))
        .collect();
    let orders: Vec<f64> = errs.windows(2).map(|e| (e[0] / e[1]).log2()).collect();
    // The flux scheme is exact at the nodes; once errors reach the quadrature
    // floor an observed order is meaningless, so that case counts as passing.
    let at_floor = ns
        .iter()
        .zip(&errs)
        .all(|(&n, &e)| e <= 1e-3 / ((n + 1) as f64).powi(2));
    let ok_order = orders.iter().all(|&p| p >= 1.9) || at_floor;
    Outcome {
        pass: ok_values && ok_order,
        detail: format!(
            "max err {err:.2e}, T(0.5) = {t_half:.7}, errors [{}] for n = {ns:?}, orders {orders:.2?}{}",
            sci(&errs),
            if at_floor { " (all at quadrature floor, below C h^2)" } else { "" }
        ),
    }
}

fn criterion_4() -> Outcome {
    let s = ito("x*(1-x)", "x*(1-x)", "[0, 1]");
    let sol = solve_mean_absorption_time(&s, 999, BoundaryConditions::auto()).expect("solve");
    let err = max_error(&sol, |x| drifted_logistic_mean_time(x).expect("closed form"));
    Outcome {
        pass: err <= 1e-4,
        detail: format!("max err {err:.2e}"),
    }
}

fn criterion_5() -> Outcome {
    let s = ito("0", "x*(1-x)", "[0, 1]");
    let st = ensemble(&s, 0.5, 20_000, 1e-4, 20.0, SEED).expect("ensemble");
    let mean = st.mean_absorption_time.unwrap_or(f64::NAN);
    let se = st.mean_absorption_time_se.unwrap_or(f64::NAN);
    let target = 2f64.ln();
    let band = (3.0 * se).max(0.02);
    Outcome {
        pass: (mean - target).abs() <= band,
        detail: format!(
            "mean {mean:.4} ± {se:.4} (SE) vs ln 2 = {target:.4}, |diff| {:.4} <= {band:.4}; absorbed {}/{}",
            (mean - target).abs(),
            st.n_absorbed,
            st.n_paths
        ),
    }
}

fn criterion_6() -> Outcome {
    let m10 = ensemble(&ito("0", "x", "[0, 10]"), 1.0, 20_000, 1e-4, 60.0, SEED).expect("ensemble");
    let mean10 = m10.mean_absorption_time.unwrap_or(f64::NAN);
    let se10 = m10.mean_absorption_time_se.unwrap_or(f64::NAN);
    let target = 10f64.ln();
    let ok10 = (mean10 - target).abs() <= 3.0 * se10 && m10.n_absorbed == m10.n_paths;

    let m100 =
        ensemble(&ito("0", "x", "[0, 100]"), 1.0, 4_000, 1e-3, 400.0, SEED).expect("ensemble");
    let mean100 = m100.mean_absorption_time.unwrap_or(f64::NAN);
    let se100 = m100.mean_absorption_time_se.unwrap_or(f64::NAN);
    Outcome {
        pass: ok10 && mean100 > mean10,
        detail: format!(
            "M=10: {mean10:.4} ± {se10:.4} vs ln 10 = {target:.4} ({} of {} exited); M=100: {mean100:.3} ± {se100:.3} (ln 100 = {:.3})",
            m10.n_absorbed,
            m10.n_paths,
            100f64.ln()
        ),
    }
}

fn criterion_7() -> Outcome {
    let s = ito("0", "x*(1-x)", "[0, 1]");
    let st = ensemble(&s, 0.5, 10_000, 1e-4, 20.0, SEED).expect("ensemble");
    Outcome {
        pass: st.absorption_probability >= 0.999,
        detail: format!(
            "absorbed by t = 20: {}/{} = {:.4}",
            st.n_absorbed, st.n_paths, st.absorption_probability
        ),
    }
}

fn criterion_8() -> Outcome {
    let dt = 1e-4;
    let steps = 10_000;
    let x0 = 0.1;
    let strat = spec("0", "x", "[0, inf)", Interpretation::Stratonovich);
    let tol = verify_tolerance(dt);

    // The truncated family needs a noise whose pre-image crosses zero at least
    // three times before the horizon; take the first such stream.
    let (stream, w) = (0u64..)
        .map(|i| (i, brownian_path(&mut GaussianStream::new(SEED, i), steps, dt)))
        .find(|(_, w)| sign_change_index(x0, w, 3).is_some())
        .expect("some stream crosses zero");

    let mut members: Vec<(String, Path)> = vec![(
        "closed form".into(),
        bessel_closed_form(x0, &w, dt).expect("closed form"),
    )];
    for n in 1..=3 {
        members.push((format!("T_{n}"), truncated_family(x0, &w, dt, n).expect("member")));
    }
    for tau in [0.0, 0.5] {
        members.push((format!("tau={tau}"), shifted_family(&w, dt, tau).expect("member")));
    }

    let mut pass = true;
    let mut parts = Vec::new();
    for (name, p) in &members {
        let r = verify_solution(&strat, p).expect("residual");
        pass &= r <= tol;
        parts.push(format!("{name}: {r:.3}"));
    }
    let mut min_dist = f64::INFINITY;
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            min_dist = min_dist.min(members[i].1.sup_distance(&members[j].1));
        }
    }
    pass &= min_dist > 0.1;

    let drifted = spec("-1/2", "x", "[0, inf)", Interpretation::Stratonovich);
    let zero = constant_path(0.0, &w, dt);
    let r = residual_profile(&drifted, &zero).expect("residual");
    let worst_rel = zero
        .times
        .iter()
        .zip(&r)
        .skip(1)
        .map(|(t, r)| (r / (t / 2.0) - 1.0).abs())
        .fold(0.0, f64::max);
    pass &= worst_rel <= 0.1;

    let crossings: Vec<usize> = (1..=3)
        .filter_map(|n| sign_change_index(x0, &w, n))
        .collect();
    Outcome {
        pass,
        detail: format!(
            "stream {stream}, sign changes at steps {crossings:?}; residuals [{}] vs tol {tol:.3}; min pairwise sup distance {min_dist:.3}; X≡0 vs drift -1/2: max |r/(t/2) - 1| = {worst_rel:.1e}",
            parts.join(", ")
        ),
    }
}

fn criterion_9() -> Outcome {
    let s = spec("0", "x", "[0, inf)", Interpretation::Stratonovich);
    let fine_steps = 10_000;
    let mut errors = [0.0; 3];
    let dts: [f64; 3] = [1e-2, 1e-3, 1e-4];
    for path in 0..100u64 {
        let w = brownian_path(&mut GaussianStream::new(SEED, path), fine_steps, 1e-4);
        let exact = (1.0 + w[fine_steps] / std::f64::consts::SQRT_2).powi(2);
        for (slot, &dt) in dts.iter().enumerate() {
            let coarse = coarsen(&w, (dt / 1e-4).round() as usize);
            let p = simulate_stratonovich(&s, 1.0, dt, 1.0, &mut FixedIncrements::from_path(&coarse))
                .expect("heun");
            errors[slot] += (p.final_state() - exact).abs() / 100.0;
        }
    }
    Outcome {
        pass: errors[0] > errors[1] && errors[1] > errors[2],
        detail: format!("mean |X_1 - closed form| at dt = {dts:?}: [{}]", sci(&errors)),
    }
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("transformation golden tests", criterion_1),
        ("boundary truth table", criterion_2),
        ("logistic BVP vs closed form", criterion_3),
        ("drifted-logistic BVP", criterion_4),
        ("Monte Carlo mean absorption time", criterion_5),
        ("Feller exit time", criterion_6),
        ("long-time absorption", criterion_7),
        ("multiplicity suite", criterion_8),
        ("Heun vs closed form", criterion_9),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = (i + 1).to_string();
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!outcome.pass);
        println!(
            "criterion {id} [{verdict}] {name} ({:.1} s): {}",
            start.elapsed().as_secs_f64(),
            outcome.detail
        );
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
