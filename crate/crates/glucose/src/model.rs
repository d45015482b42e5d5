//! Versioned JSON model file holding the trained pipeline, the baseline
//! forest and the split that produced them.

use std::fs;
use std::path::Path;

use glucose_core::dataset::split_indices;
use glucose_core::{Forest, PiecewisePipeline, SplitConfig};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MODEL_SCHEMA: &str = "glucose-model";
pub const MODEL_VERSION: u32 = 1;

/// The split a model was trained on, so evaluation can recover the test rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRecord {
    pub train_fraction: f64,
    pub seed: u64,
    pub n_rows: usize,
}

impl SplitRecord {
    pub fn config(&self) -> SplitConfig {
        SplitConfig {
            train_fraction: self.train_fraction,
            seed: self.seed,
        }
    }

    pub fn indices(&self) -> Result<(Vec<usize>, Vec<usize>)> {
        Ok(split_indices(self.n_rows, &self.config())?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub schema: String,
    pub version: u32,
    pub feature_names: Vec<String>,
    pub split: SplitRecord,
    pub pipeline: PiecewisePipeline,
    /// Global forest on raw features, trained on the same rows and seed.
    pub baseline: Forest,
}

impl ModelFile {
    pub fn new(
        feature_names: Vec<String>,
        split: SplitRecord,
        pipeline: PiecewisePipeline,
        baseline: Forest,
    ) -> Self {
        ModelFile {
            schema: MODEL_SCHEMA.into(),
            version: MODEL_VERSION,
            feature_names,
            split,
            pipeline,
            baseline,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != MODEL_SCHEMA {
            return Err(Error::Model(format!("unknown schema {:?}", self.schema)));
        }
        if self.version != MODEL_VERSION {
            return Err(Error::Model(format!(
                "unsupported version {} (expected {MODEL_VERSION})",
                self.version
            )));
        }
        let k = self.feature_names.len();
        if self.pipeline.n_features() != k || self.baseline.n_features != k {
            return Err(Error::Model("feature count disagrees between parts".into()));
        }
        self.pipeline.validate()?;
        self.baseline.validate()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: ModelFile = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ModelFile::from_json(&text)
    }
}
