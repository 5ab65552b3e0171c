//! The five analyses, each producing JSON, an optional CSV and summary rows.

use serde_json::{json, Value};

use itostrat::boundary::classify_all;
use itostrat::coefficients::{validate_spec, DiffusionSpec, Interpretation};
use itostrat::meantime::{solve_mean_absorption_time, BoundaryConditions};
use itostrat::simulate::{
    brownian_path, constant_path, ensemble, residual_profile, simulate, verify_solution,
    verify_tolerance, FixedIncrements, GaussianStream,
};
use itostrat::transform::{stratonovich_to_ito, to_dual, trivial_points};
use itostrat::Error;

use crate::config::{Analysis, ScenarioConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOutput {
    pub analysis: Analysis,
    pub json: Value,
    pub csv: Option<String>,
    pub summary: Vec<(String, String)>,
}

pub fn run_analysis(cfg: &ScenarioConfig, analysis: Analysis) -> Result<AnalysisOutput, Error> {
    let spec = cfg.spec()?;
    match analysis {
        Analysis::Transform => transform(&spec),
        Analysis::Classify => classify(&spec),
        Analysis::Meantime => meantime(cfg, &spec),
        Analysis::Simulate => simulate_ensemble(cfg, &spec),
        Analysis::Verify => verify(cfg, &spec),
    }
}

/// Boundary behaviour and mean times are properties of the Itô form.
fn ito_form(spec: &DiffusionSpec) -> Result<DiffusionSpec, Error> {
    match spec.interpretation {
        Interpretation::Ito => Ok(spec.clone()),
        Interpretation::Stratonovich => Ok(stratonovich_to_ito(spec)?.target),
    }
}

fn list(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|x| format!("{x}")).collect();
    format!("[{}]", items.join(", "))
}

fn row(key: &str, value: impl ToString) -> (String, String) {
    (key.to_string(), value.to_string())
}

fn transform(spec: &DiffusionSpec) -> Result<AnalysisOutput, Error> {
    let r = to_dual(spec)?;
    let summary = vec![
        row("direction", format!("{} -> {}", r.source.interpretation, r.target.interpretation)),
        row("f", &r.target.f),
        row("g", &r.target.g),
        row("correction", &r.correction),
        row("trivial points (source)", list(&r.fixed_points_source)),
        row("trivial points (target)", list(&r.fixed_points_target)),
        row("destroyed", list(&r.destroyed)),
        row("created", list(&r.created)),
        row("warnings", r.warnings.len()),
    ];
    Ok(AnalysisOutput {
        analysis: Analysis::Transform,
        json: serde_json::to_value(&r).expect("serializable"),
        csv: None,
        summary,
    })
}

fn classify(spec: &DiffusionSpec) -> Result<AnalysisOutput, Error> {
    let ito = ito_form(spec)?;
    let validation = validate_spec(&ito).into_result()?;
    let reports = classify_all(&ito)?;
    let mut summary = vec![row("itô drift", &ito.f)];
    if reports.is_empty() {
        summary.push(row("degenerate endpoints", "none"));
    }
    for r in &reports {
        let last = r.integral_estimates.last().map_or(f64::NAN, |p| p.1);
        summary.push(row(
            &format!("endpoint {}", r.endpoint),
            format!(
                "class {:?}, integral {:?} ({:.4e} at eps {:.0e}), agreement {}",
                r.analytic_class,
                r.integral_verdict,
                last,
                r.integral_estimates.last().map_or(f64::NAN, |p| p.0),
                r.agreement
            ),
        ));
    }
    Ok(AnalysisOutput {
        analysis: Analysis::Classify,
        json: json!({
            "ito_spec": ito,
            "zero_set": validation.zero_set(),
            "boundaries": reports,
        }),
        csv: None,
        summary,
    })
}

fn meantime(cfg: &ScenarioConfig, spec: &DiffusionSpec) -> Result<AnalysisOutput, Error> {
    let ito = ito_form(spec)?;
    let sol = solve_mean_absorption_time(&ito, cfg.n, BoundaryConditions::auto())?;
    let t_x0 = sol.value_at(cfg.x0);
    let summary = vec![
        row("grid", format!("{} interior nodes", cfg.n)),
        row("boundary conditions", format!("{:?}", sol.boundary_conditions)),
        row(&format!("T({})", cfg.x0), t_x0.map_or("n/a".into(), |t| format!("{t:.8}"))),
        row("residual", format!("{:.3e}", sol.residual_norm)),
    ];
    Ok(AnalysisOutput {
        analysis: Analysis::Meantime,
        json: json!({
            "n": cfg.n,
            "x0": cfg.x0,
            "T_x0": t_x0,
            "boundary_conditions": sol.boundary_conditions,
            "residual_norm": sol.residual_norm,
        }),
        csv: Some(sol.to_csv()),
        summary,
    })
}

fn simulate_ensemble(cfg: &ScenarioConfig, spec: &DiffusionSpec) -> Result<AnalysisOutput, Error> {
    let stats = ensemble(spec, cfg.x0, cfg.n_paths, cfg.dt, cfg.horizon, cfg.seed)?;
    let sample = simulate(
        spec,
        cfg.x0,
        cfg.dt,
        cfg.horizon,
        &mut GaussianStream::new(cfg.seed, 0),
    )?;
    let mean = match (stats.mean_absorption_time, stats.mean_absorption_time_se) {
        (Some(m), Some(se)) => format!("{m:.4} ± {se:.4}"),
        _ => "n/a".into(),
    };
    let summary = vec![
        row("paths", stats.n_paths),
        row("absorbed", stats.n_absorbed),
        row(
            "absorption probability",
            format!("{:.4} ± {:.4}", stats.absorption_probability, stats.absorption_probability_se),
        ),
        row("mean absorption time (absorbed paths)", mean),
        row("sample path final state", format!("{:.6}", sample.final_state())),
    ];
    Ok(AnalysisOutput {
        analysis: Analysis::Simulate,
        json: json!({ "ensemble": stats, "sample_path_absorbed_at": sample.absorbed_at }),
        csv: Some(sample.to_csv()),
        summary,
    })
}

fn verify(cfg: &ScenarioConfig, spec: &DiffusionSpec) -> Result<AnalysisOutput, Error> {
    let tol = verify_tolerance(cfg.dt);
    let n_steps = (cfg.horizon / cfg.dt).round() as usize;
    let w = brownian_path(&mut GaussianStream::new(cfg.seed, 0), n_steps, cfg.dt);
    let path = simulate(spec, cfg.x0, cfg.dt, cfg.horizon, &mut FixedIncrements::from_path(&w))?;
    let profile = residual_profile(spec, &path)?;
    let path_residual = profile.iter().copied().fold(0.0, f64::max);
    let first_exceed = profile.iter().position(|&r| r > tol).map(|k| path.times[k]);

    let mut summary = vec![
        row("tolerance", format!("{tol:.3e}")),
        row(
            "simulated path",
            format!("{path_residual:.3e} {}", verdict(path_residual <= tol)),
        ),
    ];
    if let Some(t) = first_exceed {
        summary.push(row("exceeds tolerance from", format!("t = {t:.4}")));
    }
    let mut constants = Vec::new();
    for x in trivial_points(spec).points {
        let r = verify_solution(spec, &constant_path(x, &w, cfg.dt))?;
        summary.push(row(&format!("X ≡ {x}"), format!("{r:.3e} {}", verdict(r <= tol))));
        constants.push(json!({ "x": x, "residual": r, "pass": r <= tol }));
    }
    let pass = path_residual <= tol && constants.iter().all(|c| c["pass"] == true);
    Ok(AnalysisOutput {
        analysis: Analysis::Verify,
        json: json!({
            "tolerance": tol,
            "sample_path": {
                "residual": path_residual,
                "pass": path_residual <= tol,
                "first_exceedance_time": first_exceed,
            },
            "constant_paths": constants,
            "pass": pass,
        }),
        csv: None,
        summary,
    })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}
