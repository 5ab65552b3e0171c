//! Command-line front end: scenario loading, analysis dispatch, output files
//! and exit codes.
//!
//! Exit codes: 0 on success, 2 for invalid input (bad config, unknown preset,
//! a spec that fails the modelling hypotheses), 1 for runtime failures.

pub mod analysis;
pub mod config;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context as _;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map};

pub use analysis::{run_analysis, AnalysisOutput};
pub use config::{preset, Analysis, ConfigError, ScenarioConfig, PRESET_NAMES};

#[derive(Debug, Parser)]
#[command(name = "itostrat", version, about = "Analyses for 1-D degenerate diffusions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert between Itô and Stratonovich form and audit trivial solutions.
    Transform(ScenarioArgs),
    /// Classify the degenerate endpoints analytically and by integral test.
    Classify(ScenarioArgs),
    /// Solve for the mean absorption time on a grid.
    Meantime(ScenarioArgs),
    /// Monte Carlo absorption statistics plus one sample path.
    Simulate(ScenarioArgs),
    /// Check candidate solutions against the integral equation.
    Verify(ScenarioArgs),
    /// Run every analysis listed in the scenario's `outputs`.
    Run(ScenarioArgs),
    /// List presets, or print one as a scenario file.
    Preset {
        name: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct ScenarioArgs {
    /// Built-in scenario, e.g. `logistic` or `feller-exit M=100`.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    pub preset: Option<String>,
    /// Scenario file (`key = value` lines or JSON).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory for `<name>.<analysis>.{json,csv}` files.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub paths: Option<usize>,
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Interior grid nodes for `meantime`.
    #[arg(long)]
    pub n: Option<usize>,
    /// Print JSON instead of the summary table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Runtime(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid input: {m}"),
            CliError::Runtime(e) => write!(f, "error: {e:#}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<itostrat::Error> for CliError {
    fn from(e: itostrat::Error) -> Self {
        use itostrat::Error::*;
        match e {
            Expression { .. } | Domain(_) | WrongInterpretation { .. } | Hypotheses(_)
            | NonDegenerate(_) | Precondition(_) | Config(_) => CliError::Invalid(e.to_string()),
            Eval(_) | Quadrature(_) | LengthMismatch(..) | Singular(_) => {
                CliError::Runtime(e.into())
            }
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command, out: &mut dyn Write) -> Result<(), CliError> {
    let (args, analyses) = match command {
        Command::Preset { name, json } => return show_preset(name.as_deref(), *json, out),
        Command::Transform(a) => (a, Some(Analysis::Transform)),
        Command::Classify(a) => (a, Some(Analysis::Classify)),
        Command::Meantime(a) => (a, Some(Analysis::Meantime)),
        Command::Simulate(a) => (a, Some(Analysis::Simulate)),
        Command::Verify(a) => (a, Some(Analysis::Verify)),
        Command::Run(a) => (a, None),
    };
    let cfg = load_scenario(args)?;
    let analyses = match analyses {
        Some(a) => vec![a],
        None if cfg.outputs.is_empty() => {
            return Err(CliError::Invalid("the scenario lists no outputs".into()))
        }
        None => cfg.outputs.clone(),
    };
    let results = analyses
        .into_iter()
        .map(|a| run_analysis(&cfg, a))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(dir) = &args.out {
        write_outputs(dir, &cfg, &results)?;
    }
    let text = if args.json {
        let mut map = Map::new();
        for r in &results {
            map.insert(r.analysis.name().to_string(), r.json.clone());
        }
        let doc = json!({ "scenario": cfg, "results": map });
        serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
    } else {
        summary_table(&cfg, &results)
    };
    out.write_all(text.as_bytes())
        .context("writing to stdout")?;
    Ok(())
}

/// Preset or config file, then command-line overrides, then validation.
pub fn load_scenario(args: &ScenarioArgs) -> Result<ScenarioConfig, CliError> {
    let mut cfg = match (&args.preset, &args.config) {
        (Some(name), _) => preset(name)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(|e| CliError::Invalid(format!("{e:#}")))?;
            ScenarioConfig::parse(&text).map_err(|e| {
                CliError::Invalid(format!("{}: {e}", path.display()))
            })?
        }
        (None, None) => return Err(CliError::Invalid("need --preset or --config".into())),
    };
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.dt {
        cfg.dt = v;
    }
    if let Some(v) = args.paths {
        cfg.n_paths = v;
    }
    if let Some(v) = args.horizon {
        cfg.horizon = v;
    }
    if let Some(v) = args.n {
        cfg.n = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Writes `<name>.config.json` and one file per analysis result.
pub fn write_outputs(
    dir: &Path,
    cfg: &ScenarioConfig,
    results: &[AnalysisOutput],
) -> anyhow::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    let mut put = |file: String, body: String| -> anyhow::Result<()> {
        let path = dir.join(file);
        std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
        Ok(())
    };
    put(
        format!("{}.config.json", cfg.name),
        serde_json::to_string_pretty(cfg)? + "\n",
    )?;
    for r in results {
        let stem = format!("{}.{}", cfg.name, r.analysis);
        put(format!("{stem}.json"), serde_json::to_string_pretty(&r.json)? + "\n")?;
        if let Some(csv) = &r.csv {
            put(format!("{stem}.csv"), csv.clone())?;
        }
    }
    Ok(written)
}

pub fn summary_table(cfg: &ScenarioConfig, results: &[AnalysisOutput]) -> String {
    let mut s = format!(
        "{}: f = {}, g = {}, {} on {}, x0 = {}\n",
        cfg.name, cfg.f, cfg.g, cfg.interpretation, cfg.domain, cfg.x0
    );
    for r in results {
        s.push_str(&format!("\n[{}]\n", r.analysis));
        let width = r.summary.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
        for (k, v) in &r.summary {
            let pad = width - k.chars().count();
            s.push_str(&format!("  {k}{}  {v}\n", " ".repeat(pad)));
        }
    }
    s
}

fn show_preset(name: Option<&str>, as_json: bool, out: &mut dyn Write) -> Result<(), CliError> {
    let text = match name {
        None if as_json => serde_json::to_string(&PRESET_NAMES).expect("serializable") + "\n",
        None => PRESET_NAMES.join("\n") + "\n",
        Some(n) => {
            let cfg = preset(n)?;
            if as_json {
                serde_json::to_string_pretty(&cfg).expect("serializable") + "\n"
            } else {
                cfg.to_key_values()
            }
        }
    };
    out.write_all(text.as_bytes()).context("writing to stdout")?;
    Ok(())
}
