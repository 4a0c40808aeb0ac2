//! Model checkpoints and the run manifest written next to them.

use std::fs;
use std::path::Path;

use sentifuse_tensor::checkpoint;
use serde::{Deserialize, Serialize};

use crate::data::{fnv1a, record_to_line, PostRecord};
use crate::error::Result;
use crate::metrics::MetricsReport;
use crate::model::{Model, ModelSpec};
use crate::train::{TrainConfig, TrainLog};

pub const CHECKPOINT_FILE: &str = "model.ckpt";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Parameters plus the spec needed to rebuild the model around them.
pub fn save_model(path: impl AsRef<Path>, model: &Model) -> Result<()> {
    let spec = serde_json::to_string(&model.spec)?;
    Ok(checkpoint::save(path, &model.store, &spec)?)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Model> {
    let (store, metadata) = checkpoint::load(path)?;
    let spec: ModelSpec = serde_json::from_str(&metadata)?;
    Model::from_parts(spec, &store)
}

/// FNV-1a over the canonical JSON lines of the records, as hex.
pub fn data_fingerprint(records: &[PostRecord]) -> Result<String> {
    let mut bytes = Vec::new();
    for r in records {
        bytes.extend_from_slice(record_to_line(r)?.as_bytes());
        bytes.push(b'\n');
    }
    Ok(format!("{:016x}", fnv1a(&bytes)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerInfo {
    pub betas: (f64, f64),
    pub eps: f64,
    pub weight_decay: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub argv: Vec<String>,
    pub seed: u64,
    pub spec: ModelSpec,
    pub train: TrainConfig,
    pub optimizer: OptimizerInfo,
    pub data_fingerprint: String,
    pub log: TrainLog,
    pub metrics: Option<MetricsReport>,
}

impl RunManifest {
    pub fn new(argv: Vec<String>, config: &TrainConfig, model: &Model, log: TrainLog, data_fingerprint: String) -> Self {
        Self {
            argv,
            seed: config.seed,
            spec: model.spec.clone(),
            train: config.clone(),
            optimizer: OptimizerInfo {
                betas: (config.beta1, config.beta2),
                eps: config.eps,
                weight_decay: config.weight_decay,
            },
            data_fingerprint,
            log,
            metrics: None,
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(fs::write(path, text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}
