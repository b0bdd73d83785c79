//! Run configuration: an optional JSON document plus command-line flags;
//! flags override file values.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Deserialize;
use subtherm::models::{CustomModelConfig, DiracModel, GeometryConfig, ModelConfig};

use crate::output::Formats;
use crate::CliError;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub model: Option<ModelSection>,
    pub geometry: Option<GeometryConfig>,
    pub out_dir: Option<PathBuf>,
    /// Subset of "csv", "svg", "json" — which artifact kinds to write.
    pub formats: Option<Vec<String>>,
    pub transverse_points: Option<usize>,
    pub kept_points: Option<usize>,
    pub chain_length: Option<usize>,
    pub m_range: Option<String>,
    pub dims: Option<Vec<usize>>,
    pub threads: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub custom: Option<CustomModelConfig>,
}

impl FileConfig {
    pub fn load(path: Option<&PathBuf>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(p.clone(), e))?;
                serde_json::from_str(&text).map_err(|e| {
                    CliError::Config(format!(
                        "{}: line {}, column {}: {e}",
                        p.display(),
                        e.line(),
                        e.column()
                    ))
                })
            }
        }
    }

    pub fn geometry(&self) -> Result<Option<subtherm::LatticeGeometry>, CliError> {
        match &self.geometry {
            None => Ok(None),
            Some(g) => g
                .build()
                .map(Some)
                .map_err(|e| CliError::Config(e.to_string())),
        }
    }
}

/// Builds the model, with flag-level name/params overriding the file.
pub fn resolve_model(
    cfg: &FileConfig,
    flag_name: Option<&str>,
    flag_params: &[(String, f64)],
) -> Result<DiracModel, CliError> {
    let mut name = cfg.model.as_ref().map(|m| m.name.clone());
    let mut params = cfg
        .model
        .as_ref()
        .map(|m| m.params.clone())
        .unwrap_or_default();
    if let Some(n) = flag_name {
        if name.as_deref() != Some(n) {
            // a different model name resets file-level parameters
            if name.is_some() {
                params.clear();
            }
            name = Some(n.to_string());
        }
    }
    for (k, v) in flag_params {
        params.insert(k.clone(), *v);
    }
    let name = name.ok_or_else(|| {
        CliError::Config("no model given (flag --model or config field `model.name`)".into())
    })?;
    let custom = cfg.model.as_ref().and_then(|m| m.custom.clone());
    let model_cfg = ModelConfig {
        name,
        params,
        custom,
    };
    model_cfg.build().map_err(|e| match e {
        subtherm::models::ModelError::UnknownModel(_)
        | subtherm::models::ModelError::UnknownParam { .. } => CliError::Config(e.to_string()),
        other => CliError::Numerical(other.to_string()),
    })
}

/// Output format selection: flag list wins over the file list; everything
/// enabled by default.
pub fn resolve_formats(cfg: &FileConfig, flag: Option<&Vec<String>>) -> Result<Formats, CliError> {
    match flag.or(cfg.formats.as_ref()) {
        None => Ok(Formats::all()),
        Some(list) => Formats::from_names(list),
    }
}

/// Parses `start:stop:step` sweep syntax.
pub fn parse_range(text: &str) -> Result<(f64, f64, f64), CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Config(format!(
            "range `{text}` must be start:stop:step"
        )));
    }
    let nums: Result<Vec<f64>, _> = parts.iter().map(|p| p.parse::<f64>()).collect();
    let nums = nums.map_err(|e| CliError::Config(format!("range `{text}`: {e}")))?;
    if nums[2] <= 0.0 || nums[1] < nums[0] {
        return Err(CliError::Config(format!(
            "range `{text}` must have stop ≥ start and step > 0"
        )));
    }
    Ok((nums[0], nums[1], nums[2]))
}

pub fn range_values((start, stop, step): (f64, f64, f64)) -> Vec<f64> {
    let count = ((stop - start) / step).round() as usize + 1;
    (0..count).map(|i| start + step * i as f64).collect()
}

/// `key=value` parser for repeated `--param` flags.
pub fn parse_kv(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("`{s}` is not key=value"))?;
    let v: f64 = v.parse().map_err(|e| format!("`{s}`: {e}"))?;
    Ok((k.to_string(), v))
}
