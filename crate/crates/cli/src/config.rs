//! Scenario files and built-in presets.
//!
//! A scenario is either JSON or flat `key = value` text:
//!
//! ```text
//! # dX = sqrt(2 X (1 - X)) dW
//! name = logistic
//! f = 0
//! g = x*(1-x)
//! domain = [0, 1]
//! interpretation = ito
//! x0 = 0.5
//! outputs = classify, meantime
//! ```
//!
//! Omitted numeric keys take the defaults below.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use itostrat::coefficients::{DiffusionSpec, Domain, Interpretation};
use itostrat::Error;

pub const DEFAULT_DT: f64 = 1e-4;
pub const DEFAULT_HORIZON: f64 = 20.0;
pub const DEFAULT_PATHS: usize = 10_000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_GRID: usize = 999;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Analysis {
    Transform,
    Classify,
    Meantime,
    Simulate,
    Verify,
}

impl Analysis {
    pub const ALL: [Analysis; 5] = [
        Analysis::Transform,
        Analysis::Classify,
        Analysis::Meantime,
        Analysis::Simulate,
        Analysis::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Analysis::Transform => "transform",
            Analysis::Classify => "classify",
            Analysis::Meantime => "meantime",
            Analysis::Simulate => "simulate",
            Analysis::Verify => "verify",
        }
    }
}

impl fmt::Display for Analysis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Analysis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Analysis::ALL
            .into_iter()
            .find(|a| a.name() == s.trim())
            .ok_or_else(|| format!("unknown analysis `{}`", s.trim()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub f: String,
    pub g: String,
    pub domain: Domain,
    pub interpretation: Interpretation,
    pub x0: f64,
    pub dt: f64,
    pub horizon: f64,
    pub n_paths: usize,
    pub seed: u64,
    /// Interior grid nodes for the mean-time solver.
    #[serde(default = "default_grid")]
    pub n: usize,
    pub outputs: Vec<Analysis>,
}

fn default_grid() -> usize {
    DEFAULT_GRID
}

/// Malformed scenario input; `line` is 1-based, `offset` is the 1-based
/// position inside an expression value.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub offset: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        ConfigError {
            line: Some(line),
            offset: None,
            message: message.into(),
        }
    }

    fn plain(message: impl Into<String>) -> Self {
        ConfigError {
            line: None,
            offset: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.offset) {
            (Some(l), Some(o)) => write!(f, "line {l}, offset {o}: {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

impl ScenarioConfig {
    /// Config with default numerics and no outputs.
    pub fn new(name: &str, f: &str, g: &str, domain: Domain, interpretation: Interpretation, x0: f64) -> Self {
        ScenarioConfig {
            name: name.to_string(),
            f: f.to_string(),
            g: g.to_string(),
            domain,
            interpretation,
            x0,
            dt: DEFAULT_DT,
            horizon: DEFAULT_HORIZON,
            n_paths: DEFAULT_PATHS,
            seed: DEFAULT_SEED,
            n: DEFAULT_GRID,
            outputs: Vec::new(),
        }
    }

    pub fn spec(&self) -> Result<DiffusionSpec, Error> {
        DiffusionSpec::parse(&self.f, &self.g, self.domain, self.interpretation)
    }

    /// Everything except the modelling hypotheses, which the analyses check.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Err(e) = self.spec() {
            return Err(ConfigError::plain(e.to_string()));
        }
        let positive = [("dt", self.dt), ("horizon", self.horizon)];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError::plain(format!("{key} must be positive, got {v}")));
            }
        }
        if self.dt >= self.horizon {
            return Err(ConfigError::plain("dt must be smaller than horizon"));
        }
        if self.n_paths == 0 {
            return Err(ConfigError::plain("n_paths must be positive"));
        }
        if self.n < 3 {
            return Err(ConfigError::plain("n must be at least 3"));
        }
        if !self.domain.contains(self.x0) {
            return Err(ConfigError::plain(format!(
                "x0 = {} is outside {}",
                self.x0, self.domain
            )));
        }
        Ok(())
    }

    /// JSON if the text starts with `{`, otherwise `key = value` lines.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| ConfigError {
                line: Some(e.line()),
                offset: Some(e.column()),
                message: e.to_string(),
            })?
        } else {
            Self::parse_key_values(text)?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn parse_key_values(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = ScenarioConfig::new(
            "scenario",
            "",
            "",
            Domain::half_line(0.0).expect("valid"),
            Interpretation::Ito,
            f64::NAN,
        );
        let mut seen = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| ConfigError::at(line, format!("expected `key = value`, got `{content}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.contains(&key.to_string()) {
                return Err(ConfigError::at(line, format!("duplicate key `{key}`")));
            }
            seen.push(key.to_string());
            let bad = |what: &str| ConfigError::at(line, format!("invalid {what} `{value}`"));
            match key {
                "name" => cfg.name = value.to_string(),
                "f" | "g" => {
                    if let Err(e) = itostrat::coefficients::parse_expr(value) {
                        return Err(ConfigError {
                            line: Some(line),
                            offset: Some(e.position),
                            message: format!("{key}: {e}"),
                        });
                    }
                    if key == "f" {
                        cfg.f = value.to_string();
                    } else {
                        cfg.g = value.to_string();
                    }
                }
                "domain" => {
                    cfg.domain = value
                        .parse()
                        .map_err(|e: Error| ConfigError::at(line, e.to_string()))?
                }
                "interpretation" => {
                    cfg.interpretation = value
                        .parse()
                        .map_err(|e: Error| ConfigError::at(line, e.to_string()))?
                }
                "x0" => cfg.x0 = value.parse().map_err(|_| bad("number"))?,
                "dt" => cfg.dt = value.parse().map_err(|_| bad("number"))?,
                "horizon" => cfg.horizon = value.parse().map_err(|_| bad("number"))?,
                "n_paths" | "paths" => cfg.n_paths = value.parse().map_err(|_| bad("count"))?,
                "seed" => cfg.seed = value.parse().map_err(|_| bad("seed"))?,
                "n" => cfg.n = value.parse().map_err(|_| bad("grid size"))?,
                "outputs" => {
                    cfg.outputs = value
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(str::parse)
                        .collect::<Result<_, _>>()
                        .map_err(|e| ConfigError::at(line, e))?
                }
                other => return Err(ConfigError::at(line, format!("unknown key `{other}`"))),
            }
        }
        for required in ["f", "g", "domain", "x0"] {
            if !seen.iter().any(|k| k == required) {
                return Err(ConfigError::plain(format!("missing key `{required}`")));
            }
        }
        Ok(cfg)
    }

    /// `key = value` rendering accepted by [`ScenarioConfig::parse`].
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "name = {}", self.name);
        let _ = writeln!(out, "f = {}", self.f);
        let _ = writeln!(out, "g = {}", self.g);
        let _ = writeln!(out, "domain = {}", self.domain);
        let _ = writeln!(out, "interpretation = {}", self.interpretation);
        let _ = writeln!(out, "x0 = {:?}", self.x0);
        let _ = writeln!(out, "dt = {:?}", self.dt);
        let _ = writeln!(out, "horizon = {:?}", self.horizon);
        let _ = writeln!(out, "n_paths = {}", self.n_paths);
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "n = {}", self.n);
        let outputs: Vec<&str> = self.outputs.iter().map(|a| a.name()).collect();
        let _ = writeln!(out, "outputs = {}", outputs.join(", "));
        out
    }
}

pub const PRESET_NAMES: [&str; 7] = [
    "feller",
    "feller-strat",
    "feller-reflect",
    "logistic",
    "logistic-drift",
    "strat-logistic",
    "feller-exit",
];

/// Built-in scenario. `feller-exit` takes the upper bound as `feller-exit M=100`
/// or `feller-exit:M=100` (default 10).
pub fn preset(name: &str) -> Result<ScenarioConfig, ConfigError> {
    use Analysis::*;
    use Interpretation::{Ito, Stratonovich};

    let name = name.trim();
    let half_line = Domain::half_line(0.0).expect("valid");
    let unit = Domain::bounded(0.0, 1.0).expect("valid");
    let (base, arg) = match name.split_once([' ', ':']) {
        Some((b, a)) => (b, Some(a.trim())),
        None => (name, None),
    };
    if arg.is_some() && base != "feller-exit" {
        return Err(ConfigError::plain(format!("preset `{base}` takes no parameters")));
    }
    let mut cfg = match base {
        "feller" => ScenarioConfig::new(base, "0", "x", half_line, Ito, 1.0)
            .with_outputs(&[Transform, Classify, Simulate, Verify]),
        "feller-strat" => ScenarioConfig::new(base, "0", "x", half_line, Stratonovich, 1.0)
            .with_outputs(&[Transform, Classify, Simulate, Verify]),
        "feller-reflect" => {
            // nothing is ever absorbed, so every path runs to the horizon
            let mut c = ScenarioConfig::new(base, "1/2", "x", half_line, Ito, 1.0)
                .with_outputs(&[Transform, Classify, Simulate]);
            c.horizon = 5.0;
            c.n_paths = 2000;
            c
        }
        "logistic" => ScenarioConfig::new(base, "0", "x*(1-x)", unit, Ito, 0.5)
            .with_outputs(&[Classify, Meantime, Simulate]),
        "logistic-drift" => ScenarioConfig::new(base, "x - x^2", "x - x^2", unit, Ito, 0.5)
            .with_outputs(&[Transform, Classify, Meantime, Simulate, Verify]),
        "strat-logistic" => {
            ScenarioConfig::new(base, "-1/2 + 2*x - x^2", "x - x^2", unit, Stratonovich, 0.5)
                .with_outputs(&[Transform, Classify, Verify])
        }
        "feller-exit" => {
            let m = match arg {
                None => 10.0,
                Some(a) => a
                    .strip_prefix("M=")
                    .and_then(|v| v.trim().parse::<f64>().ok())
                    .filter(|m| *m > 1.0 && m.is_finite())
                    .ok_or_else(|| {
                        ConfigError::plain(format!("expected `M=<value>` with M > 1, got `{a}`"))
                    })?,
            };
            let domain = Domain::bounded(0.0, m).map_err(|e| ConfigError::plain(e.to_string()))?;
            let mut c = ScenarioConfig::new(base, "0", "x", domain, Ito, 1.0)
                .with_outputs(&[Classify, Meantime, Simulate]);
            c.name = format!("feller-exit-M{m}");
            // the exit time has mean ~ ln M but a tail of order M
            c.horizon = (6.0 * m).max(DEFAULT_HORIZON);
            c
        }
        other => {
            return Err(ConfigError::plain(format!(
                "unknown preset `{other}`; available: {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    cfg.n = DEFAULT_GRID;
    Ok(cfg)
}

impl ScenarioConfig {
    fn with_outputs(mut self, outputs: &[Analysis]) -> Self {
        self.outputs = outputs.to_vec();
        self
    }
}
