//! Report envelope and the CSV row schemas.

use serde::{Deserialize, Serialize};

use crate::config::{CommandName, Format, Settings};
use crate::CliError;

/// One run: the resolved configuration followed by the command's result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report<T> {
    pub tool: String,
    pub version: String,
    pub command: CommandName,
    pub seed: u64,
    pub config: Settings,
    pub result: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(settings: &Settings, result: T) -> Self {
        Self {
            tool: "ltlab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: settings
                .command
                .expect("resolved settings name their command"),
            seed: settings.seed.expect("resolved settings carry a seed"),
            config: settings.clone(),
            result,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// Flat table behind the CSV output of a command.
pub trait Tabular {
    type Row: Serialize;
    fn rows(&self) -> Vec<Self::Row>;
}

pub fn to_csv<R: Serialize>(rows: &[R]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn render<T: Serialize + Tabular>(settings: &Settings, result: T) -> Result<String, CliError> {
    match settings.format() {
        Format::Json => Ok(Report::new(settings, result).to_json()),
        Format::Csv => to_csv(&result.rows()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyValueRow {
    pub key: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderRow {
    pub criterion: String,
    pub rung: usize,
    pub cutoff: f64,
    pub value: f64,
    pub relative_increment: Option<f64>,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateRow {
    pub eps: f64,
    pub seed: u64,
    pub mc_mean: f64,
    pub mc_se: f64,
    pub mc_second_moment: f64,
    pub mc_second_moment_se: f64,
    pub closed_second_moment: f64,
    pub z: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiRow {
    pub order: usize,
    pub term: f64,
    pub partial_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub d: usize,
    pub x: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaRow {
    pub lemma: String,
    pub case: String,
    pub x: f64,
    pub value: f64,
}
