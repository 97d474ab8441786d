//! JSON experiment configs.
//!
//! ```json
//! {
//!   "task": ["arm", "rastrigin"],
//!   "operator": ["iso", "iso_line_cross"],
//!   "seeds": [1, 2, 3],
//!   "generations": 1500,
//!   "batch_size": 64,
//!   "centroids": 256,
//!   "arm": { "links": 8 }
//! }
//! ```
//!
//! `task` and `operator` take a string or a list; `seed` or `seeds` sets the
//! seed list. Every run in the grid `task × operator × seed` shares the
//! remaining fields. Unknown keys are rejected.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use qdforge::qd_loop::RunConfig;
use qdforge::tasks::TaskSpec;
use qdforge::variation::{OperatorKind, OperatorParams};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },
}

impl ConfigError {
    fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Field named by a validation error.
    pub fn field(&self) -> Option<&str> {
        match self {
            ConfigError::Validation { field, .. } => Some(field),
            _ => None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    task: OneOrMany<String>,
    operator: OneOrMany<String>,
    seed: Option<u64>,
    seeds: Option<Vec<u64>>,
    generations: Option<usize>,
    batch_size: Option<usize>,
    centroids: Option<usize>,
    cvt_samples: Option<usize>,
    cvt_max_iters: Option<usize>,
    cvt_tol: Option<f64>,
    cvt_seed: Option<u64>,
    initial_population_size: Option<usize>,
    sigma_iso: Option<f64>,
    sigma_line: Option<f64>,
    lambda_cross: Option<f64>,
    p_cross: Option<f64>,
    arm: Option<serde_json::Map<String, serde_json::Value>>,
    rastrigin: Option<serde_json::Map<String, serde_json::Value>>,
    mlp_point: Option<serde_json::Map<String, serde_json::Value>>,
    output_dir: Option<PathBuf>,
    snapshot_every: Option<usize>,
}

/// A validated sweep: the run grid plus output settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub runs: Vec<RunConfig>,
    pub output_dir: Option<PathBuf>,
    pub snapshot_every: usize,
}

pub fn parse_config(path: &Path) -> Result<ExperimentSpec, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<ExperimentSpec, ConfigError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;

    let tasks = raw.task.into_vec();
    if tasks.is_empty() {
        return Err(ConfigError::validation("task", "at least one task is required"));
    }
    let mut task_specs = Vec::new();
    for id in &tasks {
        let block = match id.as_str() {
            "arm" => &raw.arm,
            "rastrigin" => &raw.rastrigin,
            "mlp_point" => &raw.mlp_point,
            other => {
                return Err(ConfigError::validation(
                    "task",
                    format!("unknown task `{other}` (expected arm, rastrigin, mlp_point)"),
                ))
            }
        };
        let mut obj = block.clone().unwrap_or_default();
        obj.insert("id".into(), serde_json::Value::String(id.clone()));
        let spec: TaskSpec = serde_json::from_value(serde_json::Value::Object(obj))
            .map_err(|e| ConfigError::validation(id.as_str(), e.to_string()))?;
        task_specs.push(spec);
    }

    let operators = raw
        .operator
        .into_vec()
        .iter()
        .map(|s| s.parse::<OperatorKind>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| ConfigError::validation("operator", e.to_string()))?;
    if operators.is_empty() {
        return Err(ConfigError::validation("operator", "at least one operator is required"));
    }

    let seeds = match (raw.seed, raw.seeds) {
        (Some(_), Some(_)) => {
            return Err(ConfigError::validation("seeds", "give either `seed` or `seeds`, not both"))
        }
        (Some(s), None) => vec![s],
        (None, Some(list)) => list,
        (None, None) => vec![0],
    };
    if seeds.is_empty() {
        return Err(ConfigError::validation("seeds", "at least one seed is required"));
    }
    if seeds.iter().collect::<BTreeSet<_>>().len() != seeds.len() {
        return Err(ConfigError::validation("seeds", "seeds must be distinct"));
    }
    if tasks.iter().collect::<BTreeSet<_>>().len() != tasks.len() {
        return Err(ConfigError::validation("task", "tasks must be distinct"));
    }
    if operators.iter().collect::<BTreeSet<_>>().len() != operators.len() {
        return Err(ConfigError::validation("operator", "operators must be distinct"));
    }

    let defaults = OperatorParams::default();
    let params = OperatorParams {
        sigma_iso: raw.sigma_iso.unwrap_or(defaults.sigma_iso),
        sigma_line: raw.sigma_line.unwrap_or(defaults.sigma_line),
        lambda_cross: raw.lambda_cross.unwrap_or(defaults.lambda_cross),
        p_cross: raw.p_cross.unwrap_or(defaults.p_cross),
    };

    let mut runs = Vec::new();
    for task in &task_specs {
        for &operator in &operators {
            for &seed in &seeds {
                let mut c = RunConfig::new(task.clone(), operator, seed);
                c.params = params;
                if let Some(v) = raw.generations {
                    c.generations = v;
                }
                if let Some(v) = raw.batch_size {
                    c.batch_size = v;
                }
                c.initial_population_size = raw.initial_population_size.unwrap_or(c.batch_size);
                if let Some(v) = raw.centroids {
                    c.centroids = v;
                }
                if let Some(v) = raw.cvt_samples {
                    c.cvt_samples = v;
                }
                if let Some(v) = raw.cvt_max_iters {
                    c.cvt_max_iters = v;
                }
                if let Some(v) = raw.cvt_tol {
                    c.cvt_tol = v;
                }
                if let Some(v) = raw.cvt_seed {
                    c.cvt_seed = v;
                }
                c.validate().map_err(|e| match e {
                    qdforge::Error::InvalidParameter { name, reason } => {
                        ConfigError::validation(name, reason)
                    }
                    other => ConfigError::validation("config", other.to_string()),
                })?;
                runs.push(c);
            }
        }
    }

    Ok(ExperimentSpec {
        runs,
        output_dir: raw.output_dir,
        snapshot_every: raw.snapshot_every.unwrap_or(0),
    })
}
