//! Flags, config files and their resolution into one flat run configuration.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use ltlab_core::criteria::{BaseModel, Scenario, ScenarioKind, Separation};
use ltlab_core::HurstVector;
use serde::{Deserialize, Deserializer, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandName {
    Classify,
    Criterion,
    Simulate,
    Chaos,
    Lemmas,
}

impl std::fmt::Display for CommandName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CommandName::Classify => "classify",
            CommandName::Criterion => "criterion",
            CommandName::Simulate => "simulate",
            CommandName::Chaos => "chaos",
            CommandName::Lemmas => "lemmas",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioArg {
    Localtime,
    Collision,
    Intersection,
    #[value(name = "self")]
    #[serde(rename = "self")]
    SelfIntersection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SepArg {
    Well,
    Partial,
    #[value(name = "none")]
    #[serde(rename = "none")]
    NotSeparated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelArg {
    Auto,
    Fbm,
    Fbsheet,
    Additive,
}

impl From<ModelArg> for BaseModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Auto => BaseModel::Auto,
            ModelArg::Fbm => BaseModel::Fbm,
            ModelArg::Fbsheet => BaseModel::FbSheet,
            ModelArg::Additive => BaseModel::AdditiveFbm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CriterionArg {
    /// Existence and smoothness, compared with the classifier.
    Auto,
    Existence,
    Smoothness,
    Prop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChaosMode {
    Phi,
    Composition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LemmaArg {
    All,
    L1,
    L2i,
    L2ii,
    L3i,
    L3ii,
    L8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Accepts an array, a single value, or a comma-separated string.
fn list<'de, D, T>(de: D) -> Result<Option<Vec<T>>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de> + FromStr,
    T::Err: Display,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr<T> {
        Many(Vec<T>),
        One(T),
        Text(String),
    }
    match Option::<Repr<T>>::deserialize(de)? {
        None => Ok(None),
        Some(Repr::Many(v)) => Ok(Some(v)),
        Some(Repr::One(x)) => Ok(Some(vec![x])),
        Some(Repr::Text(s)) => s
            .split(',')
            .map(|p| p.trim().parse::<T>().map_err(serde::de::Error::custom))
            .collect::<Result<Vec<_>, _>>()
            .map(Some),
    }
}

/// Every setting, as a flag and as a key of the flat config document.
///
/// Unset values stay `None` until [`resolve`] fills in the defaults of the command.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Settings {
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandName>,

    /// Scenario type.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioArg>,
    /// Placement of the two rectangles of a self-intersection.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sep: Option<SepArg>,
    /// Parameter dimension; a single Hurst index is repeated N times.
    #[arg(long = "N")]
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Hurst indices, comma separated.
    #[arg(long = "H", value_delimiter = ',')]
    #[serde(
        rename = "H",
        deserialize_with = "list",
        skip_serializing_if = "Option::is_none"
    )]
    pub h: Option<Vec<f64>>,
    /// Hurst indices of the second field.
    #[arg(long = "K", value_delimiter = ',')]
    #[serde(
        rename = "K",
        deserialize_with = "list",
        skip_serializing_if = "Option::is_none"
    )]
    pub k: Option<Vec<f64>>,
    /// State-space dimension.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    /// Level of a plain local time, comma separated (default: origin).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(deserialize_with = "list", skip_serializing_if = "Option::is_none")]
    pub level: Option<Vec<f64>>,
    /// Separated directions of a partial self-intersection (1-based).
    #[arg(long = "S", value_delimiter = ',')]
    #[serde(
        rename = "S",
        deserialize_with = "list",
        skip_serializing_if = "Option::is_none"
    )]
    pub s: Option<Vec<usize>>,
    /// Gap between separated rectangles.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps0: Option<f64>,
    /// Treat the partial self-intersection thresholds as sharp.
    #[arg(long = "assume-c4", num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assume_c4: Option<bool>,
    /// Base field.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelArg>,

    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criterion: Option<CriterionArg>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Excision radii, decreasing.
    #[arg(long, value_delimiter = ',')]
    #[serde(deserialize_with = "list", skip_serializing_if = "Option::is_none")]
    pub ladder: Option<Vec<f64>>,
    /// Criteria of higher dimension are skipped.
    #[arg(long = "max-dim")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_dim: Option<usize>,
    /// Quadrature budget per criterion.
    #[arg(long = "max-evals")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_evals: Option<u64>,

    /// Regularization of the chaos series.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[arg(long = "eps-ladder", value_delimiter = ',')]
    #[serde(deserialize_with = "list", skip_serializing_if = "Option::is_none")]
    pub eps_ladder: Option<Vec<f64>>,
    /// Grid points per parameter direction.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicates: Option<usize>,
    /// Fixed number of series terms (default: automatic).
    #[arg(long = "trunc-n")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trunc_n: Option<usize>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<ChaosMode>,
    /// Number of grid points in [0.01, 0.99] for ratio scans.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,

    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lemma: Option<LemmaArg>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Values of A for the one-dimensional bands.
    #[arg(long = "A", value_delimiter = ',')]
    #[serde(
        rename = "A",
        deserialize_with = "list",
        skip_serializing_if = "Option::is_none"
    )]
    pub a: Option<Vec<f64>>,
    /// Fixed M for a single logarithmic point-configuration check.
    #[arg(long = "M")]
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    /// Point counts of the configuration scans.
    #[arg(long = "n-values", value_delimiter = ',')]
    #[serde(deserialize_with = "list", skip_serializing_if = "Option::is_none")]
    pub n_values: Option<Vec<usize>>,
    /// Random configurations per point count.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub configs: Option<usize>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Report path (default: standard output).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

pub const DEFAULT_SEED: u64 = 1;

fn to_map(s: &Settings) -> serde_json::Map<String, serde_json::Value> {
    match serde_json::to_value(s) {
        Ok(serde_json::Value::Object(m)) => m,
        _ => unreachable!("settings serialize to an object"),
    }
}

impl Settings {
    /// Reads a TOML document, or JSON when the extension is `.json`.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        let parsed = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Values set in `over` replace those in `self`.
    pub fn overlay(&self, over: &Settings) -> Settings {
        let mut base = to_map(self);
        base.extend(to_map(over));
        serde_json::from_value(serde_json::Value::Object(base)).expect("merged settings stay valid")
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    fn hurst(&self, values: &Option<Vec<f64>>, flag: &str) -> Result<HurstVector, CliError> {
        let v = values
            .clone()
            .ok_or_else(|| CliError::Scenario(format!("--{flag} is required")))?;
        let v = match (self.n, v.len()) {
            (Some(n), 1) => vec![v[0]; n],
            (Some(n), len) if n != len => {
                return Err(CliError::Scenario(format!(
                    "--{flag} has {len} entries but N = {n}"
                )));
            }
            _ => v,
        };
        HurstVector::new(v).map_err(|e| CliError::Scenario(e.to_string()))
    }

    /// The scenario described by the resolved settings.
    pub fn scenario(&self) -> Result<Scenario, CliError> {
        let d = self.d.unwrap_or(1);
        let h = self.hurst(&self.h, "H")?;
        let kind = match self.scenario.unwrap_or(ScenarioArg::Localtime) {
            ScenarioArg::Localtime => ScenarioKind::LocalTime {
                h,
                level: self.level.clone().unwrap_or_default(),
            },
            ScenarioArg::Collision => ScenarioKind::Collision {
                h,
                k: self.hurst(&self.k, "K")?,
            },
            ScenarioArg::Intersection => ScenarioKind::Intersection {
                h,
                k: self.hurst(&self.k, "K")?,
            },
            ScenarioArg::SelfIntersection => {
                let eps0 = self.eps0.unwrap_or(0.2);
                let separation = match self.sep.unwrap_or(SepArg::Well) {
                    SepArg::Well => Separation::WellSeparated { eps0 },
                    SepArg::NotSeparated => Separation::NotSeparated,
                    SepArg::Partial => Separation::PartiallySeparated {
                        s: self
                            .s
                            .clone()
                            .ok_or_else(|| CliError::Scenario("--S is required".into()))?,
                        eps0,
                        assume_c4: self.assume_c4.unwrap_or(false),
                    },
                };
                ScenarioKind::SelfIntersection { h, separation }
            }
        };
        let scenario = Scenario { kind, d };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn model(&self) -> BaseModel {
        self.model.unwrap_or(ModelArg::Auto).into()
    }
}

/// Merges the config file and the flags and fills in the defaults of `command`, so the
/// result names every value the run depends on.
pub fn resolve(
    command: CommandName,
    file: Option<&Path>,
    flags: &Settings,
) -> Result<Settings, CliError> {
    let base = match file {
        Some(p) => Settings::from_file(p)?,
        None => Settings::default(),
    };
    if let Some(c) = base.command {
        if c != command {
            return Err(CliError::Config(format!(
                "config file is for `{c}`, not `{command}`"
            )));
        }
    }
    let mut s = base.overlay(flags);
    s.command = Some(command);
    s.seed.get_or_insert(DEFAULT_SEED);
    s.format.get_or_insert(Format::Json);
    let scenario_based = !matches!(command, CommandName::Lemmas)
        && !(command == CommandName::Chaos && s.mode == Some(ChaosMode::Composition));
    if scenario_based {
        s.scenario.get_or_insert(ScenarioArg::Localtime);
        s.d.get_or_insert(1);
        if s.scenario == Some(ScenarioArg::SelfIntersection) {
            let sep = *s.sep.get_or_insert(SepArg::Well);
            if sep != SepArg::NotSeparated {
                s.eps0.get_or_insert(0.2);
            }
            if sep == SepArg::Partial {
                s.assume_c4.get_or_insert(false);
            }
        }
    }
    match command {
        CommandName::Classify => {}
        CommandName::Criterion => {
            s.model.get_or_insert(ModelArg::Auto);
            let c = *s.criterion.get_or_insert(CriterionArg::Auto);
            if c == CriterionArg::Prop {
                s.gamma.get_or_insert(1.0);
                s.lambda.get_or_insert(0.0);
            }
            s.max_dim.get_or_insert(4);
            s.max_evals
                .get_or_insert(ltlab_core::criteria::QuadratureBudget::default().max_evals);
        }
        CommandName::Simulate => {
            s.model.get_or_insert(ModelArg::Auto);
            s.eps_ladder
                .get_or_insert_with(|| ltlab_core::localtime::DEFAULT_EPS_LADDER.to_vec());
            s.replicates.get_or_insert(2000);
        }
        CommandName::Chaos => {
            let mode = *s.mode.get_or_insert(ChaosMode::Phi);
            match mode {
                ChaosMode::Phi => {
                    s.model.get_or_insert(ModelArg::Auto);
                    s.eps.get_or_insert(0.5);
                }
                ChaosMode::Composition => {
                    s.d.get_or_insert(2);
                    s.points.get_or_insert(99);
                }
            }
        }
        CommandName::Lemmas => {
            s.lemma.get_or_insert(LemmaArg::All);
            s.a.get_or_insert_with(|| (1..=6).map(|k| 10f64.powi(-k)).collect());
            s.n_values.get_or_insert_with(|| vec![1, 2, 4, 8, 16, 32]);
            s.configs.get_or_insert(1000);
            s.points.get_or_insert(99);
        }
    }
    Ok(s)
}
