//! Run configuration: a JSON file (or built-in preset) plus flag overrides.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use trion_core::entangle::{BellLabel, FilterSpec};
use trion_core::evolve::{IntegratorConfig, StateVector};
use trion_core::{ModelParams, Result as CoreResult};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelParams,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolve: Option<EvolveBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entangle: Option<EntangleBlock>,
    /// Worker-pool size; defaults to the number of available execution units.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub phi_min: f64,
    pub phi_max: f64,
    pub n_points: usize,
    /// Initial states whose minimum survival probability is appended as
    /// pmin_<alpha> columns.
    #[serde(default)]
    pub pmin_alphas: Vec<usize>,
    #[serde(default = "default_periods")]
    pub pmin_periods: usize,
    /// Gap threshold for exact crossings; defaults to 1e-4 * omega.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_tol: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveBlock {
    /// Eight [re, im] amplitude pairs; renormalized (with a warning) when the
    /// norm is off by more than 1e-6.
    pub initial_state: Vec<[f64; 2]>,
    #[serde(default = "default_periods")]
    pub n_periods: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntangleBlock {
    pub initial_state: Vec<[f64; 2]>,
    #[serde(default = "default_periods")]
    pub n_periods: usize,
    /// Bell targets; one overlap_<name> and envelope_<name> column pair each.
    pub targets: Vec<BellLabel>,
    #[serde(default)]
    pub analytic: AnalyticKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filter: Option<FilterSpec>,
}

/// Which closed-form concurrence goes in the concurrence_analytic column.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnalyticKind {
    /// 2 |c_i||c_j| over the first target's amplitude pair.
    #[default]
    PairProduct,
    /// The four-amplitude interference formula on (c1, c2, c7, c8).
    DoubleSlit,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    /// Output file; stdout when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

fn default_periods() -> usize {
    30
}

impl RunConfig {
    /// Core-level validation shared by every command.
    pub fn validate(&self) -> Result<(), CliError> {
        self.model.validate().map_err(config_err)?;
        self.integrator.validate().map_err(config_err)?;
        if let Some(sweep) = &self.sweep {
            if sweep.n_points < 2
                || !sweep.phi_min.is_finite()
                || !sweep.phi_max.is_finite()
                || sweep.phi_min > sweep.phi_max
            {
                return Err(CliError::Config(format!(
                    "sweep range [{}, {}] with {} points is empty",
                    sweep.phi_min, sweep.phi_max, sweep.n_points
                )));
            }
            if sweep.pmin_alphas.iter().any(|&a| !(1..=8).contains(&a)) {
                return Err(CliError::Config("pmin_alphas entries must lie in 1..=8".into()));
            }
            if sweep.pmin_periods == 0 {
                return Err(CliError::Config("pmin_periods must be at least 1".into()));
            }
        }
        if let Some(evolve) = &self.evolve {
            if evolve.n_periods == 0 {
                return Err(CliError::Config("n_periods must be at least 1".into()));
            }
            parse_state(&evolve.initial_state)?;
        }
        if let Some(entangle) = &self.entangle {
            if entangle.n_periods == 0 {
                return Err(CliError::Config("n_periods must be at least 1".into()));
            }
            if entangle.targets.is_empty() {
                return Err(CliError::Config("entangle.targets must not be empty".into()));
            }
            let mut seen = entangle.targets.clone();
            seen.sort_by_key(|t| t.series_name());
            seen.dedup();
            if seen.len() != entangle.targets.len() {
                return Err(CliError::Config("entangle.targets must be distinct".into()));
            }
            parse_state(&entangle.initial_state)?;
            if let Some(filter) = &entangle.filter {
                filter.validate().map_err(config_err)?;
            }
        }
        Ok(())
    }
}

fn config_err(e: trion_core::Error) -> CliError {
    CliError::Config(e.to_string())
}

/// Builds the (renormalized) initial state from the config amplitudes,
/// warning on stderr when the stated norm is off by more than 1e-6.
pub fn parse_state(pairs: &[[f64; 2]]) -> Result<StateVector, CliError> {
    if pairs.len() != 8 {
        return Err(CliError::Config(format!(
            "initial_state needs 8 amplitude pairs, got {}",
            pairs.len()
        )));
    }
    let mut amps = [num_complex::Complex64::new(0.0, 0.0); 8];
    for (slot, pair) in amps.iter_mut().zip(pairs) {
        *slot = num_complex::Complex64::new(pair[0], pair[1]);
    }
    let norm_sqr: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    if !norm_sqr.is_finite() || norm_sqr < 1e-24 {
        return Err(CliError::Config("initial_state is zero or not finite".into()));
    }
    if (norm_sqr.sqrt() - 1.0).abs() > 1e-6 {
        eprintln!(
            "warning: initial state norm {} renormalized to 1",
            norm_sqr.sqrt()
        );
    }
    let state: CoreResult<StateVector> = StateVector::normalized(amps);
    state.map_err(config_err)
}

/// Recursive JSON merge: objects merge key-wise, everything else is replaced.
pub fn merge_json(base: &mut serde_json::Value, patch: serde_json::Value) {
    match (base, patch) {
        (serde_json::Value::Object(base_map), serde_json::Value::Object(patch_map)) => {
            for (key, value) in patch_map {
                match base_map.get_mut(&key) {
                    Some(slot) => merge_json(slot, value),
                    None => {
                        base_map.insert(key, value);
                    }
                }
            }
        }
        (slot, value) => *slot = value,
    }
}

/// Applies one `--override key=value` pair: the dotted key addresses a JSON
/// path, the value is parsed as JSON when possible and as a string otherwise.
pub fn apply_override(config: &mut serde_json::Value, spec: &str) -> Result<(), CliError> {
    let (path, raw_value) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override '{spec}' is not key=value")))?;
    if path.is_empty() {
        return Err(CliError::Config("override key is empty".into()));
    }
    let value = serde_json::from_str(raw_value)
        .unwrap_or_else(|_| serde_json::Value::String(raw_value.to_string()));

    let mut slot = config;
    for segment in path.split('.') {
        if !slot.is_object() {
            *slot = serde_json::Value::Object(serde_json::Map::new());
        }
        slot = slot
            .as_object_mut()
            .unwrap()
            .entry(segment.to_string())
            .or_insert(serde_json::Value::Null);
    }
    *slot = value;
    Ok(())
}
