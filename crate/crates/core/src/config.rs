//! Run configuration shared by the pipeline stages.
//!
//! The file format is flat `key = value` lines (TOML syntax). Feature keys
//! are those of [`FeatureConfig`]; the remaining keys are listed on
//! [`RunConfig`]. Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::features::FeatureConfig;
use crate::gbdt::Preset;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionMode {
    /// Feature selection sees every row, then the table is split.
    PaperOrder,
    /// The table is split first and selection sees the training rows only.
    TrainOnly,
}

impl SelectionMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SelectionMode::PaperOrder => "paper-order",
            SelectionMode::TrainOnly => "train-only",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "paper-order" => Some(SelectionMode::PaperOrder),
            "train-only" => Some(SelectionMode::TrainOnly),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    #[serde(flatten)]
    pub features: FeatureConfig,
    pub test_fraction: f64,
    pub seed: u64,
    pub target_k: usize,
    pub rfe_step: usize,
    pub rfe_preset: Preset,
    pub preset: Preset,
    pub selection_mode: SelectionMode,
    pub threshold: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            features: FeatureConfig::default(),
            test_fraction: 0.2,
            seed: 42,
            target_k: 24,
            rfe_step: 1,
            rfe_preset: Preset::B,
            preset: Preset::A,
            selection_mode: SelectionMode::PaperOrder,
            threshold: 0.5,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.features.validate()?;
        if !(0.0..1.0).contains(&self.test_fraction) {
            return Err(Error::Config("test_fraction must lie in [0, 1)".into()));
        }
        if self.rfe_step == 0 {
            return Err(Error::Config("rfe_step must be at least 1".into()));
        }
        if self.target_k == 0 {
            return Err(Error::Config("target_k must be at least 1".into()));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::Config("threshold must lie in (0, 1)".into()));
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let table: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let known = toml::Table::try_from(RunConfig::default()).expect("default config serialises");
        if let Some(key) = table.keys().find(|k| !known.contains_key(*k)) {
            return Err(Error::Config(format!("unknown key {key:?}")));
        }
        let cfg: RunConfig = table.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serialises")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = RunConfig::default();
        let text = cfg.to_toml();
        assert!(text.contains("selection_mode = \"paper-order\""));
        assert!(text.contains("target_rate = 16000"));
        assert_eq!(RunConfig::from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let cfg = RunConfig::from_toml("seed = 7\npreset = \"b\"\nn_mels = 26\n").unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.preset, Preset::B);
        assert_eq!(cfg.features.n_mels, 26);
        assert_eq!(cfg.target_k, 24);
    }

    #[test]
    fn unknown_and_invalid_keys_fail() {
        assert!(matches!(RunConfig::from_toml("sed = 1"), Err(Error::Config(_))));
        assert!(matches!(RunConfig::from_toml("test_fraction = 1.0"), Err(Error::Config(_))));
        assert!(matches!(RunConfig::from_toml("threshold = 0.0"), Err(Error::Config(_))));
    }
}
