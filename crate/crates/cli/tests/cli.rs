use std::process::Command;

use proptest::prelude::*;
use serde_json::Value;

use itostrat_cli::{preset, run_cli, ScenarioConfig, PRESET_NAMES};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("itostrat").chain(args.iter().copied());
    let code = run_cli(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn run_json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    let (code, out, err) = run(&all);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn classify_feller() {
    let v = run_json(&["classify", "--preset", "feller"]);
    let b = &v["results"]["classify"]["boundaries"][0];
    assert_eq!(b["endpoint"], 0.0);
    assert_eq!(b["analytic_class"], "AccessibleAbsorbing");
    assert_eq!(b["integral_verdict"], "Finite");
    assert_eq!(b["agreement"], true);
}

#[test]
fn classify_stratonovich_uses_the_ito_form() {
    let v = run_json(&["classify", "--preset", "feller-strat"]);
    let c = &v["results"]["classify"];
    assert_eq!(c["ito_spec"]["f"], "0.5");
    assert_eq!(c["boundaries"][0]["analytic_class"], "AccessibleReflecting");
}

#[test]
fn transform_feller() {
    let v = run_json(&["transform", "--preset", "feller"]);
    let t = &v["results"]["transform"];
    assert_eq!(t["correction"], "-0.5");
    assert_eq!(t["destroyed"], serde_json::json!([0.0]));
    assert_eq!(t["target"]["interpretation"], "stratonovich");
}

#[test]
fn meantime_logistic_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, stdout, err) = run(&["meantime", "--preset", "logistic", "--n", "999", "--out", out]);
    assert_eq!(code, 0, "{err}");
    assert!(stdout.contains("T(0.5)"));

    let csv = std::fs::read_to_string(dir.path().join("logistic.meantime.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,T"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (x, t) = l.split_once(',').unwrap();
            (x.parse().unwrap(), t.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 1001);
    let mid = rows.iter().find(|(x, _)| (x - 0.5).abs() < 1e-12).unwrap();
    assert!((mid.1 - 2f64.ln()).abs() < 1e-5, "{}", mid.1);

    let json: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("logistic.meantime.json")).unwrap())
            .unwrap();
    assert!((json["T_x0"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-5);

    // the written config reproduces the scenario
    let cfg_text = std::fs::read_to_string(dir.path().join("logistic.config.json")).unwrap();
    assert_eq!(ScenarioConfig::parse(&cfg_text).unwrap(), preset("logistic").unwrap());
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for name in PRESET_NAMES {
        let (code, text, _) = run(&["preset", name]);
        assert_eq!(code, 0);
        let path = dir.path().join(format!("{name}.cfg"));
        std::fs::write(&path, &text).unwrap();
        let (code, json, _) = run(&["preset", name, "--json"]);
        assert_eq!(code, 0);
        let from_json = ScenarioConfig::parse(&json).unwrap();
        assert_eq!(ScenarioConfig::parse(&text).unwrap(), from_json);
        assert_eq!(from_json, preset(name).unwrap());
    }
    let path = dir.path().join("logistic.cfg");
    let v = run_json(&["transform", "--config", path.to_str().unwrap()]);
    assert_eq!(v["scenario"]["name"], "logistic");
}

#[test]
fn simulate_small_ensemble_is_reproducible() {
    let args = [
        "simulate", "--preset", "logistic", "--paths", "200", "--dt", "1e-3", "--horizon", "5",
        "--seed", "9",
    ];
    let a = run_json(&args);
    let b = run_json(&args);
    assert_eq!(a, b);
    let e = &a["results"]["simulate"]["ensemble"];
    assert_eq!(e["n_paths"], 200);
    assert_eq!(e["seed"], 9);
    let t = e["mean_absorption_time"].as_f64().unwrap();
    assert!((t - 2f64.ln()).abs() < 0.15, "{t}");
}

#[test]
fn verify_reports_trivial_solutions() {
    let v = run_json(&["verify", "--preset", "logistic-drift", "--dt", "1e-3", "--horizon", "2"]);
    let r = &v["results"]["verify"];
    let xs: Vec<f64> = r["constant_paths"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["x"].as_f64().unwrap())
        .collect();
    assert_eq!(xs, vec![0.0, 1.0]);
    assert_eq!(r["pass"], true);
}

#[test]
fn run_executes_listed_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.cfg");
    std::fs::write(
        &path,
        "name = s\nf = 0\ng = x*(1-x)\ndomain = [0, 1]\nx0 = 0.25\nn = 199\noutputs = classify, meantime\n",
    )
    .unwrap();
    let v = run_json(&["run", "--config", path.to_str().unwrap()]);
    let results = v["results"].as_object().unwrap();
    assert_eq!(results.keys().collect::<Vec<_>>(), ["classify", "meantime"]);
    let t = results["meantime"]["T_x0"].as_f64().unwrap();
    let exact = -(0.25f64 * 0.25f64.ln() + 0.75 * 0.75f64.ln());
    assert!((t - exact).abs() < 1e-6, "{t} vs {exact}");
}

#[test]
fn invalid_input_exits_with_2() {
    let (code, _, err) = run(&["classify", "--preset", "nope"]);
    assert_eq!(code, 2);
    assert!(err.contains("unknown preset"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    std::fs::write(&path, "f = 0\ng = x*(\ndomain = [0, 1]\nx0 = 0.5\n").unwrap();
    let (code, _, err) = run(&["classify", "--config", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2"), "{err}");

    // negative diffusion coefficient fails the hypotheses
    std::fs::write(&path, "f = 0\ng = x - 1\ndomain = [0, 2]\nx0 = 0.5\n").unwrap();
    assert_eq!(run(&["classify", "--config", path.to_str().unwrap()]).0, 2);

    // mean time needs an Itô form with accessible ends; both reflecting is refused
    assert_eq!(run(&["meantime", "--preset", "feller"]).0, 2);
    assert_eq!(run(&["simulate", "--preset", "logistic", "--dt", "-1"]).0, 2);
    assert_eq!(run(&["classify"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_itostrat");
    let ok = Command::new(bin).args(["preset"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("feller-exit"));
    let bad = Command::new(bin).args(["classify", "--preset", "nope"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("unknown preset"));
}

#[test]
fn feller_exit_parameter_forms() {
    let a = run_json(&["classify", "--preset", "feller-exit M=100"]);
    let b = run_json(&["classify", "--preset", "feller-exit:M=100"]);
    assert_eq!(a, b);
    assert_eq!(a["scenario"]["domain"], "[0, 100]");
    assert_eq!(run(&["classify", "--preset", "feller-exit M=0.5"]).0, 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scenario_round_trips(
        a in -5.0f64..5.0,
        width in 0.1f64..10.0,
        frac in 0.0f64..=1.0,
        dt in 1e-6f64..1e-2,
        n_paths in 1usize..100_000,
        seed in any::<u64>(),
        n in 3usize..5000,
        strat in any::<bool>(),
    ) {
        let domain = itostrat::Domain::bounded(a, a + width).unwrap();
        let interp = if strat {
            itostrat::Interpretation::Stratonovich
        } else {
            itostrat::Interpretation::Ito
        };
        let mut cfg = ScenarioConfig::new("p", "x^2 - 1/3", "(x - 1)*exp(x)", domain, interp, a + frac * width);
        cfg.dt = dt;
        cfg.horizon = dt * 1000.0;
        cfg.n_paths = n_paths;
        cfg.seed = seed;
        cfg.n = n;
        cfg.outputs = vec![itostrat_cli::Analysis::Verify, itostrat_cli::Analysis::Classify];
        prop_assert_eq!(ScenarioConfig::parse(&cfg.to_key_values()).unwrap(), cfg.clone());
        let json = serde_json::to_string(&cfg).unwrap();
        prop_assert_eq!(ScenarioConfig::parse(&json).unwrap(), cfg);
    }
}
