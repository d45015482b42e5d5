//! Optional TOML config file. Each command reads its own table; command-line
//! flags take precedence over values found here.
//!
//! ```toml
//! [gen]
//! n = 600
//! seed = 7
//!
//! [train]
//! window = 5
//! trees = 100
//!
//! [evaluate]
//! format = "structured"
//! test_transform = "history"
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use glucose_core::TestTransform;
use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    #[default]
    Text,
    Structured,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenSection {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub informative: Option<usize>,
    pub noise_sd: Option<f64>,
    pub drift_amp: Option<f64>,
    pub drift_period: Option<f64>,
    pub glucose_low: Option<f64>,
    pub glucose_high: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub seed: Option<u64>,
    pub window: Option<usize>,
    pub trees: Option<usize>,
    pub train_fraction: Option<f64>,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: Option<usize>,
    pub mtry: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluateSection {
    pub format: Option<ReportFormat>,
    pub test_transform: Option<TestTransform>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub gen: GenSection,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub evaluate: EvaluateSection,
    #[serde(default)]
    pub predict: EvaluateSection,
}

impl FileConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config {
            path: PathBuf::from(path),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        FileConfig::parse(&text, path)
    }
}
