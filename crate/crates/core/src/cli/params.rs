//! Run parameters: long flags and the keys of the optional TOML config file
//! are the same set. Flags override the file; per-command defaults fill the
//! rest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::analysis::NoiseSite;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Site {
    Sender,
    Receiver,
}

impl From<Site> for NoiseSite {
    fn from(s: Site) -> Self {
        match s {
            Site::Sender => NoiseSite::Sender,
            Site::Receiver => NoiseSite::Receiver,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Classical,
    Ea,
}

/// What an interval or rectangle run varies along its x axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Vary {
    None,
    R,
    Alpha,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Every key a command may take. Unset keys are `None`.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Params {
    /// Channel transmissivity.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// Signal amplitude (q quadrature for EA).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Squeezing parameter.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// Probability of sending bit 0.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prior: Option<f64>,
    /// Where the added noise enters.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub site: Option<Site>,
    /// Comma-separated thresholds, one series each.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<f64>>,
    /// First grid value.
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    /// Last grid value.
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    /// Grid spacing.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    /// Qubit encoding displacement.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    /// Transmissivity under hypothesis 0.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta0: Option<f64>,
    /// Transmissivity under hypothesis 1.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta1: Option<f64>,
    /// EA: amplitude on the p quadrature.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_p: Option<f64>,
    /// EA: threshold on the p quadrature (default: same as theta).
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_p: Option<f64>,
    /// EA: prior of the p bit.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prior_p: Option<f64>,
    /// EA: fixed noise standard deviation on p (default: swept with q).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_p: Option<f64>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<SchemeKind>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vary: Option<Vary>,
    /// Monte Carlo samples per scenario.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    /// Number of random Monte Carlo scenarios.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenarios: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Worker threads (default: $STOCHRES_THREADS, else 1).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Output file (default: stdout).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

macro_rules! each_key {
    ($m:ident) => {
        $m!(
            eta, alpha, r, prior, site, theta, start, stop, step, x0, eta0, eta1, alpha_p, theta_p, prior_p, sigma_p,
            scheme, vary, n, scenarios, seed, threads, format, output
        )
    };
}

/// Keys that never change the emitted numbers and are kept out of `meta`.
const PLUMBING: [&str; 4] = ["seed", "threads", "format", "output"];

impl Params {
    /// Field-wise `self` if set, else `other`.
    pub fn or(self, other: Params) -> Params {
        macro_rules! merge {
            ($($k:ident),*) => { Params { $($k: self.$k.or(other.$k)),* } };
        }
        each_key!(merge)
    }

    /// Names of the keys that are set, in config-file spelling.
    pub fn set_keys(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        macro_rules! collect {
            ($($k:ident),*) => { $( if self.$k.is_some() { keys.push(key_name(stringify!($k))); } )* };
        }
        each_key!(collect);
        keys
    }

    pub fn from_file(path: &Path) -> Result<Params, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
    }

    /// The scenario keys as JSON values, without plumbing keys.
    pub fn to_meta(&self) -> BTreeMap<String, serde_json::Value> {
        let value = serde_json::to_value(self).unwrap_or_default();
        value
            .as_object()
            .map(|o| {
                o.iter()
                    .filter(|(k, _)| !PLUMBING.contains(&k.as_str()))
                    .map(|(k, v)| (k.clone(), v.clone()))
                    .collect()
            })
            .unwrap_or_default()
    }
}

fn key_name(field: &'static str) -> &'static str {
    match field {
        "alpha_p" => "alpha-p",
        "theta_p" => "theta-p",
        "prior_p" => "prior-p",
        "sigma_p" => "sigma-p",
        other => other,
    }
}

/// A required key; the defaults guarantee presence for known commands.
pub(crate) fn req<T: Clone>(v: &Option<T>, key: &str) -> Result<T, CliError> {
    v.clone().ok_or_else(|| CliError::Config(format!("missing key {key}")))
}

/// `start, start + step, ..., <= stop`, each rounded to 12 decimals so that
/// grids like 0.05 * 3 print as `0.15`.
pub fn grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(CliError::Config("grid bounds must be finite".into()));
    }
    if !(start < stop) {
        return Err(CliError::Config(format!("grid needs start < stop, got {start} and {stop}")));
    }
    if !(step >= 1e-9) {
        return Err(CliError::Config(format!("grid step must be at least 1e-9, got {step}")));
    }
    let count = ((stop - start) / step + 1e-9).floor();
    if count > 1e6 {
        return Err(CliError::Config(format!("grid has {count} points, more than 1e6")));
    }
    Ok((0..=count as usize)
        .map(|i| {
            let x = start + i as f64 * step;
            (x * 1e12).round() / 1e12
        })
        .collect())
}
