//! Run configuration: one JSON file covering model, solver, and
//! integrator settings. Command-line flags override file values; every
//! field has a default, so `{}` is a complete configuration.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::dynamics::DynOptions;
use crate::model::ModelParams;
use crate::scatter::ScatterOptions;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub params: ModelParams,
    pub scatter: ScatterOptions,
    #[serde(rename = "dynamics")]
    pub dyn_opts: DynOptions,
    /// Momentum for commands and sweeps that need one fixed `k`.
    pub k: Option<f64>,
    #[serde(rename = "output")]
    pub output_path: Option<PathBuf>,
    pub format: OutputFormat,
}

impl RunConfig {
    /// Parse a config file, naming the offending key on failure.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| Error::invalid(format!("config {}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut de = serde_json::Deserializer::from_str(text);
        let config: RunConfig = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let path = e.path().to_string();
            Error::invalid(if path == "." {
                format!("{}", e.inner())
            } else {
                format!("{} (at key {path})", e.inner())
            })
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.scatter.validate()?;
        self.dyn_opts.validate()?;
        if let Some(k) = self.k {
            if !k.is_finite() {
                return Err(Error::invalid(format!("k = {k} must be finite")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_the_default_config() {
        let config = RunConfig::parse("{}").unwrap();
        assert_eq!(config, RunConfig::default());
        assert_eq!(config.params.omega, 2.0);
        assert_eq!(config.format, OutputFormat::Csv);
        assert!(config.k.is_none());
    }

    #[test]
    fn nested_overrides_apply() {
        let text = r#"{
            "params": {"g": 1.5, "N": 10},
            "scatter": {"root_scan_points": 512},
            "dynamics": {"dt": 5e-4, "photons": 15.0},
            "k": 1.57,
            "output": "run/out.csv",
            "format": "json"
        }"#;
        let config = RunConfig::parse(text).unwrap();
        assert_eq!(config.params.g, 1.5);
        assert_eq!(config.params.half_len, 10);
        assert_eq!(config.scatter.root_scan_points, 512);
        assert_eq!(config.dyn_opts.dt, 5e-4);
        assert_eq!(config.dyn_opts.photons, 15.0);
        assert_eq!(config.k, Some(1.57));
        assert_eq!(config.format, OutputFormat::Json);
    }

    #[test]
    fn unknown_keys_are_named_in_the_error() {
        let err = RunConfig::parse(r#"{"paramz": {}}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("paramz"), "diagnostic must name the key: {msg}");
    }

    #[test]
    fn malformed_json_is_rejected() {
        assert!(RunConfig::parse("{not json").is_err());
        assert!(RunConfig::parse(r#"{"params": {"g": "high"}}"#).is_err());
    }

    #[test]
    fn invalid_numbers_fail_validation() {
        let err = RunConfig::parse(r#"{"dynamics": {"dt": -1.0}}"#).unwrap_err();
        assert!(err.to_string().contains("dt"));
        let err = RunConfig::parse(r#"{"scatter": {"root_scan_points": 3}}"#).unwrap_err();
        assert!(err.to_string().contains("root_scan_points"));
    }

    #[test]
    fn config_round_trips() {
        let mut config = RunConfig::default();
        config.params.g = 2.0;
        config.k = Some(0.5);
        let text = serde_json::to_string(&config).unwrap();
        let back = RunConfig::parse(&text).unwrap();
        assert_eq!(back, config);
    }
}
