//! Run configuration: TOML (or JSON, by file extension) with every key
//! optional. Missing keys fall back to the shipped defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, StateVec, DEFAULT_POPULATION};
use crate::pmp::{ObjectiveWeights, SweepConfig};
use crate::strategies::{strategy, Scenario, STRATEGIES};

const INITIAL_KEYS: [&str; 6] =
    ["susceptible", "exposed", "infected", "asymptomatic", "recovered", "virus"];

pub const DEFAULT_CONFIG_TOML: &str = include_str!("../data/default_config.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    #[default]
    Both,
}

impl OutputFormat {
    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "both" => Ok(OutputFormat::Both),
            other => Err(Error::config("format", format!("expected csv, json or both, got {other:?}"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
            OutputFormat::Both => "both",
        })
    }
}

/// Parses a comma-separated selection of strategy ids, scenario letters and
/// `all` into sorted, deduplicated strategy ids.
pub fn parse_selection(text: &str) -> Result<Vec<u32>> {
    let mut ids = Vec::new();
    for token in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if token.eq_ignore_ascii_case("all") {
            ids.extend(STRATEGIES.iter().map(|s| s.id));
        } else if let Ok(id) = token.parse::<u32>() {
            strategy(id)?;
            ids.push(id);
        } else {
            let scenario: Scenario = token.parse()?;
            ids.extend(scenario.strategies().map(|s| s.id));
        }
    }
    if ids.is_empty() {
        return Err(Error::config("strategies", "selection is empty"));
    }
    ids.sort_unstable();
    ids.dedup();
    Ok(ids)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Selection {
    Ids(Vec<u32>),
    Text(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialSection {
    susceptible: Option<f64>,
    exposed: Option<f64>,
    infected: Option<f64>,
    asymptomatic: Option<f64>,
    recovered: Option<f64>,
    virus: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    strategies: Option<Selection>,
    out_dir: Option<PathBuf>,
    format: Option<OutputFormat>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    model: BTreeMap<String, f64>,
    #[serde(default)]
    initial: InitialSection,
    #[serde(default)]
    weights: ObjectiveWeights,
    #[serde(default)]
    sweep: SweepConfig,
    #[serde(default)]
    run: RunSection,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub population: f64,
    pub params: ModelParams,
    pub initial: StateVec,
    pub weights: ObjectiveWeights,
    pub sweep: SweepConfig,
    pub strategies: Vec<u32>,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::from_toml_str(DEFAULT_CONFIG_TOML).expect("shipped default config parses")
    }
}

fn model_from_section(section: &BTreeMap<String, f64>) -> Result<(f64, ModelParams)> {
    let population = section.get("population").copied().unwrap_or(DEFAULT_POPULATION);
    let mut params = ModelParams::calibrated(population);
    let mut lambda_given = false;
    for (key, &value) in section {
        let slot = match key.as_str() {
            "population" => continue,
            "lambda" => {
                lambda_given = true;
                &mut params.lambda
            }
            "d" => &mut params.d,
            "beta1" => &mut params.beta1,
            "beta2" => &mut params.beta2,
            "beta3" => &mut params.beta3,
            "beta4" => &mut params.beta4,
            "delta" => &mut params.delta,
            "tau" => &mut params.tau,
            "d1" => &mut params.d1,
            "gamma1" => &mut params.gamma1,
            "gamma2" => &mut params.gamma2,
            "psi1" => &mut params.psi1,
            "psi2" => &mut params.psi2,
            "psi3" => &mut params.psi3,
            "phi" => &mut params.phi,
            other => return Err(Error::config(format!("model.{other}"), "unknown parameter")),
        };
        *slot = value;
    }
    if !lambda_given {
        params.lambda = params.d * population;
    }
    Ok((population, params))
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| Error::config("config", e.to_string()))?;
        Self::from_raw(raw)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: RawConfig =
            serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))?;
        Self::from_raw(raw)
    }

    /// Reads a `.json` file as JSON and anything else as TOML. The result is
    /// not validated.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("config", format!("{}: {e}", path.display())))?;
        let is_json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            Self::from_json_str(&text)
        } else {
            Self::from_toml_str(&text)
        }
    }

    fn from_raw(raw: RawConfig) -> Result<Self> {
        let (population, params) = model_from_section(&raw.model)?;
        let init = &raw.initial;
        let e = init.exposed.unwrap_or(1.0e4);
        let i = init.infected.unwrap_or(5.0e3);
        let a = init.asymptomatic.unwrap_or(3.0e3);
        let r = init.recovered.unwrap_or(0.0);
        let b = init.virus.unwrap_or(5.0e3);
        let s = init.susceptible.unwrap_or(population - e - i - a - r);
        let strategies = match raw.run.strategies {
            None => STRATEGIES.iter().map(|s| s.id).collect(),
            Some(Selection::Text(t)) => parse_selection(&t)?,
            Some(Selection::Ids(ids)) => {
                let text: Vec<String> = ids.iter().map(u32::to_string).collect();
                parse_selection(&text.join(","))?
            }
        };
        Ok(Self {
            population,
            params,
            initial: StateVec::new(s, e, i, a, r, b),
            weights: raw.weights,
            sweep: raw.sweep,
            strategies,
            out_dir: raw.run.out_dir.unwrap_or_else(|| PathBuf::from("out")),
            format: raw.run.format.unwrap_or_default(),
        })
    }

    /// Checks every field before any solve starts.
    pub fn validate(&self) -> Result<()> {
        if !(self.population.is_finite() && self.population > 0.0) {
            return Err(Error::config("model.population", "must be positive and finite"));
        }
        self.params.validate()?;
        self.weights.validate()?;
        self.sweep.validate()?;
        let x = self.initial;
        for (name, v) in INITIAL_KEYS.iter().zip(x.to_array()) {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::config(
                    format!("initial.{name}"),
                    format!("must be nonnegative and finite, got {v}"),
                ));
            }
        }
        // Efficacy curves divide by these.
        for (name, v) in [("exposed", x.e), ("infected", x.i), ("asymptomatic", x.a), ("virus", x.b)] {
            if v == 0.0 {
                return Err(Error::config(format!("initial.{name}"), "must be positive"));
            }
        }
        if !(x.s + x.e + x.i + x.a + x.r > 0.0) {
            return Err(Error::config("initial", "total human population must be positive"));
        }
        if self.strategies.is_empty() {
            return Err(Error::config("run.strategies", "selection is empty"));
        }
        for &id in &self.strategies {
            strategy(id)?;
        }
        Ok(())
    }
}
