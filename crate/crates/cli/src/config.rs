//! Run configuration: defaults, TOML file and command-line flags, merged in
//! that order of increasing precedence.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use lpplab_core::{Geometry, ModelParams};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Simulate,
    Exact,
    Fredholm,
    Limit,
    Converge,
    Airy,
    Selftest,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Simulate => "simulate",
            CommandKind::Exact => "exact",
            CommandKind::Fredholm => "fredholm",
            CommandKind::Limit => "limit",
            CommandKind::Converge => "converge",
            CommandKind::Airy => "airy",
            CommandKind::Selftest => "selftest",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum RouteChoice {
    Exact,
    #[default]
    Fredholm,
    Both,
}

/// A list of reals written as `a,b,c` or `start:stop:step` (inclusive).
#[derive(Clone, Debug, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            let [a, b, h] = parts.as_slice() else {
                return Err(format!("range `{s}` must be start:stop:step"));
            };
            let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
            let (a, b, h) = (num(a)?, num(b)?, num(h)?);
            if h.is_nan() || h <= 0.0 || !a.is_finite() || !b.is_finite() || b < a {
                return Err(format!("range `{s}` needs start <= stop and step > 0"));
            }
            let count = ((b - a) / h + 1e-9).floor() as usize + 1;
            if count > 1_000_000 {
                return Err(format!("range `{s}` has too many points"));
            }
            return Ok(Grid((0..count).map(|k| a + h * k as f64).collect()));
        }
        let values = s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(format!("grid `{s}` has non-finite entries"));
        }
        Ok(Grid(values))
    }
}

/// Grid as written in a config file: an array or a grid string.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    List(Vec<f64>),
    Text(String),
}

impl GridSpec {
    fn resolve(self, field: &str) -> Result<Vec<f64>, CliError> {
        match self {
            GridSpec::List(v) => Ok(v),
            GridSpec::Text(s) => s.parse::<Grid>().map(|g| g.0).map_err(|e| CliError::invalid(field, e)),
        }
    }
}

/// Every setting optional; produced by the file and by the flags.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub command: Option<CommandKind>,
    pub geometry: Option<Geometry>,
    pub alpha: Option<Vec<f64>>,
    pub beta: Option<Vec<f64>>,
    pub n: Option<usize>,
    pub gamma: Option<f64>,
    pub u_grid: Option<GridSpec>,
    pub s_grid: Option<GridSpec>,
    pub x_grid: Option<GridSpec>,
    pub r_grid: Option<GridSpec>,
    pub n_list: Option<Vec<usize>>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub route: Option<RouteChoice>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub length: Option<f64>,
    pub level_cap: Option<u32>,
    pub contour_m: Option<usize>,
    pub criteria: Option<Vec<u32>>,
}

impl PartialConfig {
    pub fn from_toml_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::invalid("config", format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::invalid("config", format!("{}: {}", path.display(), e.message())))
    }

    /// Fields set in `self` win over those in `lower`.
    pub fn over(self, lower: PartialConfig) -> PartialConfig {
        PartialConfig {
            command: self.command.or(lower.command),
            geometry: self.geometry.or(lower.geometry),
            alpha: self.alpha.or(lower.alpha),
            beta: self.beta.or(lower.beta),
            n: self.n.or(lower.n),
            gamma: self.gamma.or(lower.gamma),
            u_grid: self.u_grid.or(lower.u_grid),
            s_grid: self.s_grid.or(lower.s_grid),
            x_grid: self.x_grid.or(lower.x_grid),
            r_grid: self.r_grid.or(lower.r_grid),
            n_list: self.n_list.or(lower.n_list),
            samples: self.samples.or(lower.samples),
            seed: self.seed.or(lower.seed),
            route: self.route.or(lower.route),
            format: self.format.or(lower.format),
            output: self.output.or(lower.output),
            length: self.length.or(lower.length),
            level_cap: self.level_cap.or(lower.level_cap),
            contour_m: self.contour_m.or(lower.contour_m),
            criteria: self.criteria.or(lower.criteria),
        }
    }
}

/// Fully resolved configuration; written into every output header.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    pub geometry: Geometry,
    pub alpha: Option<Vec<f64>>,
    pub beta: Option<Vec<f64>>,
    pub n: Option<usize>,
    pub gamma: f64,
    pub u_grid: Vec<f64>,
    pub s_grid: Vec<f64>,
    pub x_grid: Vec<f64>,
    pub r_grid: Vec<f64>,
    pub n_list: Vec<usize>,
    pub samples: u64,
    pub seed: u64,
    pub route: RouteChoice,
    pub format: Format,
    pub output: Option<PathBuf>,
    /// Truncation length of the Fredholm determinants; `None` = automatic.
    pub length: Option<f64>,
    pub level_cap: u32,
    pub contour_m: usize,
    pub criteria: Vec<u32>,
}

pub const DEFAULT_GAMMA: f64 = 0.5;
pub const DEFAULT_SAMPLES: u64 = 100_000;
pub const DEFAULT_LEVEL_CAP: u32 = 6;
pub const DEFAULT_CONTOUR_M: usize = 512;
pub const OUTPUT_DIR_ENV: &str = "LPPLAB_OUTPUT_DIR";

fn grid(spec: Option<GridSpec>, field: &str, default: &str) -> Result<Vec<f64>, CliError> {
    match spec {
        Some(s) => s.resolve(field),
        None => Ok(default.parse::<Grid>().expect("valid default grid").0),
    }
}

impl RunConfig {
    /// Fills unset fields with defaults; the output directory from the
    /// environment applies only when no output path is set.
    pub fn resolve(p: PartialConfig, env_dir: Option<PathBuf>) -> Result<RunConfig, CliError> {
        let command = p.command.ok_or_else(|| CliError::invalid("command", "no command given"))?;
        let format = p.format.unwrap_or_default();
        let output = p.output.or_else(|| env_dir.map(|d| d.join(format!("{}.{}", command.name(), format.extension()))));
        let default_n_list: &[usize] = if command == CommandKind::Airy { &[100, 1000, 10000] } else { &[4, 8, 16, 32] };
        let cfg = RunConfig {
            command,
            geometry: p.geometry.unwrap_or(Geometry::Flat),
            alpha: p.alpha,
            beta: p.beta,
            n: p.n,
            gamma: p.gamma.unwrap_or(DEFAULT_GAMMA),
            u_grid: grid(p.u_grid, "u_grid", "0:10:1")?,
            s_grid: grid(p.s_grid, "s_grid", "-5:3:0.5")?,
            x_grid: grid(p.x_grid, "x_grid", "-4:4:0.5")?,
            r_grid: grid(p.r_grid, "r_grid", "-1,0,1")?,
            n_list: p.n_list.unwrap_or_else(|| default_n_list.to_vec()),
            samples: p.samples.unwrap_or(DEFAULT_SAMPLES),
            seed: p.seed.unwrap_or(0),
            route: p.route.unwrap_or_default(),
            format,
            output,
            length: p.length,
            level_cap: p.level_cap.unwrap_or(DEFAULT_LEVEL_CAP),
            contour_m: p.contour_m.unwrap_or(DEFAULT_CONTOUR_M),
            criteria: p.criteria.unwrap_or_else(|| (1..=9).collect()),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(CliError::invalid("gamma", format!("must be positive, got {}", self.gamma)));
        }
        if self.samples == 0 {
            return Err(CliError::invalid("samples", "must be at least 1"));
        }
        if let Some(l) = self.length {
            if !(l > 0.0 && l.is_finite()) {
                return Err(CliError::invalid("length", format!("must be positive, got {l}")));
            }
        }
        if !self.contour_m.is_power_of_two() || self.contour_m < 8 {
            return Err(CliError::invalid("contour_m", format!("must be a power of two >= 8, got {}", self.contour_m)));
        }
        if self.n_list.contains(&0) {
            return Err(CliError::invalid("n_list", "entries must be at least 1"));
        }
        if let Some(&c) = self.criteria.iter().find(|c| !(1..=9).contains(*c)) {
            return Err(CliError::invalid("criteria", format!("no criterion {c}")));
        }
        if matches!(self.command, CommandKind::Simulate | CommandKind::Exact | CommandKind::Fredholm) {
            self.model()?;
        }
        Ok(())
    }

    /// Model parameters: explicit `alpha`/`beta`, or i.i.d. rates `gamma` with size `n`.
    pub fn model(&self) -> Result<ModelParams, CliError> {
        match (&self.alpha, &self.beta, self.n) {
            (Some(a), Some(b), n) => {
                if n.is_some_and(|n| n != a.len()) {
                    return Err(CliError::invalid("n", format!("is {} but alpha has {} entries", n.unwrap(), a.len())));
                }
                Ok(ModelParams::new(self.geometry, a.clone(), b.clone())?)
            }
            (None, None, Some(n)) => Ok(ModelParams::iid(self.geometry, n, self.gamma)?),
            (Some(_), None, _) => Err(CliError::invalid("beta", "required together with alpha")),
            (None, Some(_), _) => Err(CliError::invalid("alpha", "required together with beta")),
            (None, None, None) => Err(CliError::invalid("model", "give alpha and beta, or n (i.i.d. with gamma)")),
        }
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serde_json::to_string(self).map_err(|_| fmt::Error)?)
    }
}
