//! Experiment configuration: JSON schema, flag overrides and validation.

use std::fmt;
use std::path::Path;

use qcdual_core::chain::{ChainParams, GaudinParams};
use qcdual_core::classical::ClassicalState;
use qcdual_core::{Error, C64};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::report::SCHEMA;

pub const DEFAULT_SEED: u64 = 20140815;
pub const SEED_ENV: &str = "QCDUAL_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Spectrum,
    Duality,
    Invert,
    Bethe,
    Dynamics,
    Gaudin,
    Limits,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Command::Spectrum => "spectrum",
            Command::Duality => "duality",
            Command::Invert => "invert",
            Command::Bethe => "bethe",
            Command::Dynamics => "dynamics",
            Command::Gaudin => "gaudin",
            Command::Limits => "limits",
        };
        f.write_str(s)
    }
}

/// A real number or an `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub C64);

impl Num {
    pub fn real(v: f64) -> Self {
        Num(C64::new(v, 0.0))
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.im == 0.0 {
            s.serialize_f64(self.0.re)
        } else {
            [self.0.re, self.0.im].serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Real(f64),
            Pair([f64; 2]),
        }
        match Raw::deserialize(d).map_err(|_| de::Error::custom("expected a number or an [re, im] pair"))? {
            Raw::Real(v) => Ok(Num::real(v)),
            Raw::Pair([re, im]) => Ok(Num(C64::new(re, im))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    All,
    M(usize),
}

impl std::str::FromStr for Sector {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "all" {
            return Ok(Sector::All);
        }
        s.parse().map(Sector::M).map_err(|_| format!("sector must be a magnon number or \"all\", got {s:?}"))
    }
}

impl Serialize for Sector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Sector::All => s.serialize_str("all"),
            Sector::M(m) => s.serialize_u64(*m as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Sector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            M(usize),
            Word(String),
        }
        match Raw::deserialize(d).map_err(|_| de::Error::custom("sector must be a magnon number or \"all\""))? {
            Raw::M(m) => Ok(Sector::M(m)),
            Raw::Word(w) => w.parse().map_err(de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Rs,
    Cm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default = "default_eta")]
    pub eta: Num,
    #[serde(default = "default_twist")]
    pub twist: [Num; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<Num>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_sites: Option<usize>,
}

fn default_eta() -> Num {
    Num::real(1.0)
}

fn default_twist() -> [Num; 2] {
    [Num::real(2.0), Num::real(1.0)]
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self { n: None, eta: default_eta(), twist: default_twist(), x: None, max_sites: None }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub starts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsConfig {
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_kind")]
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<Num>>,
}

fn default_t_end() -> f64 {
    1.0
}

fn default_dt() -> f64 {
    1e-3
}

fn default_kind() -> Kind {
    Kind::Rs
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self { t_end: default_t_end(), dt: default_dt(), kind: default_kind(), v: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitsConfig {
    #[serde(default = "default_etas")]
    pub etas: Vec<f64>,
}

fn default_etas() -> Vec<f64> {
    vec![1e-1, 1e-2, 1e-3, 1e-4]
}

impl Default for LimitsConfig {
    fn default() -> Self {
        Self { etas: default_etas() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_format")]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default = "default_timestamp")]
    pub timestamp: bool,
}

fn default_format() -> Format {
    Format::Json
}

fn default_timestamp() -> bool {
    true
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { format: default_format(), path: None, timestamp: default_timestamp() }
    }
}

/// Configuration as read from a file and adjusted by flags. Everything is
/// optional here; [`ExperimentConfig::resolve`] fills in defaults and
/// validates.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default)]
    pub chain: ChainConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sector: Option<Sector>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub dynamics: DynamicsConfig,
    #[serde(default)]
    pub limits: LimitsConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

/// Turns a model-validation error into a message that points at the
/// offending pair of sites.
fn describe(what: &str, e: &Error) -> ConfigError {
    ConfigError(match e {
        Error::CoincidentPoints { i, j } => format!("{what}: pair (i,j) = ({i},{j}) coincides: x_{i} = x_{j}"),
        Error::ShiftCollision { i, j } => {
            format!("{what}: pair (i,j) = ({i},{j}) is not in general position: x_{i} - x_{j} = eta")
        }
        other => format!("{what}: {other}"),
    })
}

impl ExperimentConfig {
    /// Reads a configuration file. A report written by this program is also
    /// accepted, in which case its echoed configuration is used.
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| ConfigError(format!("config {} is not valid JSON: {e}", path.display())))?;
        let value = match value.get("schema") {
            Some(tag) if tag == SCHEMA => value
                .get("config")
                .cloned()
                .ok_or_else(|| ConfigError(format!("report {} has no config echo", path.display())))?,
            Some(tag) => return err(format!("unsupported report schema {tag} in {}", path.display())),
            None => value,
        };
        serde_json::from_value(value).map_err(|e| ConfigError(format!("config {}: {e}", path.display())))
    }

    pub fn resolve(mut self) -> Result<Resolved, ConfigError> {
        let command = match self.command {
            Some(c) => c,
            None => return err("no command given"),
        };
        let chain = &mut self.chain;
        let x = match (&chain.x, chain.n) {
            (Some(x), Some(n)) if x.len() != n => {
                return err(format!("chain.n = {n} does not match the {} inhomogeneities in chain.x", x.len()))
            }
            (Some(x), _) => x.clone(),
            (None, n) => (0..n.unwrap_or(2)).map(|k| Num::real(2.0 * k as f64)).collect(),
        };
        let n = x.len();
        chain.n = Some(n);
        chain.x = Some(x.clone());
        let xs: Vec<C64> = x.iter().map(|z| z.0).collect();
        let eta = chain.eta.0;
        let twist = (chain.twist[0].0, chain.twist[1].0);
        let max_sites = chain.max_sites.unwrap_or(qcdual_core::tensorspace::DEFAULT_MAX_SITES);

        let model = match command {
            Command::Gaudin | Command::Limits => {
                Model::Gaudin(GaudinParams::new(twist, xs.clone()).map_err(|e| describe("chain.x", &e))?)
            }
            Command::Dynamics => Model::Classical,
            _ => Model::Chain(ChainParams::with_max_sites(eta, twist, xs.clone(), max_sites).map_err(|e| describe("chain", &e))?),
        };
        if matches!(command, Command::Limits | Command::Gaudin) && n > max_sites {
            return err(format!("{n} sites exceeds chain.max_sites = {max_sites}"));
        }

        let sectors = match command {
            Command::Dynamics | Command::Limits => {
                self.sector = None;
                Vec::new()
            }
            _ => {
                let top = if command == Command::Bethe { n / 2 } else { n };
                let sector = self.sector.unwrap_or(Sector::All);
                self.sector = Some(sector);
                match sector {
                    Sector::All => (0..=top).collect(),
                    Sector::M(m) if m <= top => vec![m],
                    Sector::M(m) => return err(format!("sector {m} out of range 0..={top} for {command} with N = {n}")),
                }
            }
        };

        let solver = &mut self.solver;
        let starts = *solver.starts.get_or_insert(match command {
            Command::Bethe => 4,
            _ => 200,
        });
        if starts == 0 {
            return err("solver.starts must be at least 1");
        }
        let tol = *solver.tol.get_or_insert(default_tol(command));
        if !(tol > 0.0) || !tol.is_finite() {
            return err(format!("solver.tol must be positive, got {tol}"));
        }
        let seed = *solver.seed.get_or_insert(DEFAULT_SEED);

        let mut classical = None;
        match command {
            Command::Dynamics => {
                let d = &mut self.dynamics;
                if !(d.dt > 0.0) || !d.dt.is_finite() {
                    return err(format!("dynamics.dt must be positive, got {}", d.dt));
                }
                if !(d.t_end >= 0.0) || !d.t_end.is_finite() {
                    return err(format!("dynamics.t_end must be non-negative, got {}", d.t_end));
                }
                let v = d.v.get_or_insert_with(|| {
                    let v0 = if d.kind == Kind::Rs { -1.0 } else { 0.0 };
                    vec![Num::real(v0); n]
                });
                if v.len() != n {
                    return err(format!("dynamics.v has {} entries for {n} particles", v.len()));
                }
                let vs: Vec<C64> = v.iter().map(|z| z.0).collect();
                let state = match d.kind {
                    Kind::Rs => ClassicalState::rs(xs, vs, eta),
                    Kind::Cm => ClassicalState::cm(xs, vs),
                };
                classical = Some(state.map_err(|e| describe("initial state", &e))?);
            }
            Command::Limits => {
                let v = self.dynamics.v.get_or_insert_with(|| vec![Num::real(0.0); n]);
                if v.len() != n {
                    return err(format!("dynamics.v has {} entries for {n} particles", v.len()));
                }
                let etas = &self.limits.etas;
                if etas.len() < 2 {
                    return err("limits.etas needs at least two values");
                }
                if etas.iter().any(|e| !(*e > 0.0)) || etas.windows(2).any(|w| w[1] >= w[0]) {
                    return err("limits.etas must be positive and strictly decreasing");
                }
            }
            _ => {}
        }
        if self.output.format == Format::Csv && !matches!(command, Command::Spectrum | Command::Gaudin) {
            return err(format!("csv output is only available for spectrum tables (spectrum, gaudin), not {command}"));
        }

        Ok(Resolved { command, sectors, starts, tol, seed, model, classical, config: self })
    }
}

/// Per-command default for the check tolerance.
pub fn default_tol(command: Command) -> f64 {
    match command {
        Command::Spectrum => qcdual_core::spectra::RECORD_RESIDUAL_TOL,
        Command::Duality | Command::Gaudin => qcdual_core::duality::DUALITY_TOL,
        Command::Invert => qcdual_core::duality::INVERSE_RESIDUAL_TOL,
        Command::Bethe => qcdual_core::bethe::ORACLE_MATCH_TOL,
        Command::Dynamics => 1e-8,
        Command::Limits => 0.1,
    }
}

#[derive(Debug, Clone)]
pub enum Model {
    Chain(ChainParams),
    Gaudin(GaudinParams),
    Classical,
}

/// A validated configuration, ready to run.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub command: Command,
    pub sectors: Vec<usize>,
    pub starts: usize,
    pub tol: f64,
    pub seed: u64,
    pub model: Model,
    pub classical: Option<ClassicalState>,
    /// The configuration with every default filled in; echoed in reports.
    pub config: ExperimentConfig,
}
