use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nncore::{Matrix, ParamSet};
use crate::train::{EpochRecord, TrainConfig};

use super::config::ModelConfig;
use super::params::ModelParams;

pub const CHECKPOINT_VERSION: u32 = 1;

/// Trained weights with the configuration and history that produced them.
#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub params: ModelParams,
    pub train_config: TrainConfig,
    pub history: Vec<EpochRecord>,
    /// Epoch whose weights are stored (1-based; 0 for an untrained model).
    pub best_epoch: usize,
}

#[derive(Serialize, Deserialize)]
struct StoredArray {
    name: String,
    shape: [usize; 2],
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct StoredCheckpoint {
    format_version: u32,
    model_config: ModelConfig,
    train_config: TrainConfig,
    best_epoch: usize,
    params: Vec<StoredArray>,
    history: Vec<EpochRecord>,
}

impl Checkpoint {
    pub fn model_config(&self) -> &ModelConfig {
        self.params.config()
    }

    pub fn to_json(&self) -> Result<String> {
        let stored = StoredCheckpoint {
            format_version: CHECKPOINT_VERSION,
            model_config: *self.params.config(),
            train_config: self.train_config.clone(),
            best_epoch: self.best_epoch,
            params: self
                .params
                .set()
                .entries()
                .iter()
                .map(|e| StoredArray {
                    name: e.name.clone(),
                    shape: e.value.shape(),
                    data: e.value.as_slice().to_vec(),
                })
                .collect(),
            history: self.history.clone(),
        };
        serde_json::to_string_pretty(&stored)
            .map_err(|e| Error::Numeric(format!("cannot encode checkpoint: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            field: "checkpoint".into(),
            message: e.to_string(),
        })?;
        match raw
            .get("format_version")
            .and_then(serde_json::Value::as_u64)
        {
            Some(v) if v == CHECKPOINT_VERSION as u64 => {}
            Some(v) => {
                return Err(Error::Version {
                    found: v as u32,
                    expected: CHECKPOINT_VERSION,
                })
            }
            None => {
                return Err(Error::Parse {
                    line: 1,
                    field: "format_version".into(),
                    message: "missing or not an integer".into(),
                })
            }
        }
        let mut de = serde_json::Deserializer::from_str(text);
        let stored: StoredCheckpoint =
            serde_path_to_error::deserialize(&mut de).map_err(|e| Error::Parse {
                line: e.inner().line(),
                field: e.path().to_string(),
                message: e.inner().to_string(),
            })?;
        let mut set = ParamSet::new();
        for a in stored.params {
            let m = Matrix::from_vec(a.shape[0], a.shape[1], a.data).map_err(|_| {
                Error::Config(format!(
                    "parameter `{}` data does not match its shape",
                    a.name
                ))
            })?;
            if !m.is_finite() {
                return Err(Error::Numeric(format!(
                    "parameter `{}` is not finite",
                    a.name
                )));
            }
            set.push(a.name, m);
        }
        let params = ModelParams::from_set(stored.model_config, set)?;
        Ok(Self {
            params,
            train_config: stored.train_config,
            history: stored.history,
            best_epoch: stored.best_epoch,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
