use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenegen::CameraConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    /// Raw object feature size (F).
    pub feature_size: usize,
    /// Node width after projection and positional coding (D, even).
    pub node_dim: usize,
    pub gcn_layers: usize,
    pub gcn_hidden: usize,
    pub lstm_layers: usize,
    pub lstm_hidden: usize,
    /// Observed frames per sample (T).
    pub obs_window: usize,
    /// Predicted steps (H).
    pub horizon: usize,
    pub knn_k: usize,
    /// Rows of the positional table; must exceed the larger image side.
    pub pe_max_len: usize,
    pub seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            feature_size: 64,
            node_dim: 32,
            gcn_layers: 2,
            gcn_hidden: 32,
            lstm_layers: 2,
            lstm_hidden: 64,
            obs_window: 8,
            horizon: 5,
            knn_k: 4,
            pe_max_len: 801,
            seed: 7,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("feature_size", self.feature_size),
            ("gcn_layers", self.gcn_layers),
            ("gcn_hidden", self.gcn_hidden),
            ("lstm_layers", self.lstm_layers),
            ("lstm_hidden", self.lstm_hidden),
            ("obs_window", self.obs_window),
            ("horizon", self.horizon),
            ("knn_k", self.knn_k),
            ("pe_max_len", self.pe_max_len),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        if self.node_dim < 2 || !self.node_dim.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "node_dim must be even and >= 2, got {}",
                self.node_dim
            )));
        }
        Ok(())
    }

    /// Checks the positional table covers every quantized pixel coordinate.
    pub fn check_camera(&self, cam: &CameraConfig) -> Result<()> {
        let side = cam.image_width.max(cam.image_height) as usize;
        if self.pe_max_len <= side {
            return Err(Error::Config(format!(
                "pe_max_len = {} must exceed the larger image side {side}",
                self.pe_max_len
            )));
        }
        Ok(())
    }

    /// Input and output width of GCN layer `l`.
    pub fn gcn_dims(&self, l: usize) -> (usize, usize) {
        let d_in = if l == 0 {
            self.node_dim
        } else {
            self.gcn_hidden
        };
        (d_in, self.gcn_hidden)
    }

    pub fn lstm_input(&self, l: usize) -> usize {
        if l == 0 {
            self.gcn_hidden
        } else {
            self.lstm_hidden
        }
    }
}

/// Closed-form count of scalar trainable parameters.
pub fn count_parameters(cfg: &ModelConfig) -> usize {
    let projection = cfg.feature_size * cfg.node_dim + cfg.node_dim;
    let gcn: usize = (0..cfg.gcn_layers)
        .map(|l| {
            let (i, o) = cfg.gcn_dims(l);
            i * o + o
        })
        .sum();
    let lstm: usize = (0..cfg.lstm_layers)
        .map(|l| {
            let h = cfg.lstm_hidden;
            4 * h * (cfg.lstm_input(l) + h) + 4 * h
        })
        .sum();
    let head = cfg.lstm_hidden * 2 * cfg.horizon + 2 * cfg.horizon;
    projection + gcn + lstm + head
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lstm_layer_count() {
        // one LSTM layer, input 64, hidden 32
        let h = 32;
        assert_eq!(4 * h * (64 + h) + 4 * h, 12416);
    }

    #[test]
    fn default_counts_stay_small() {
        let cfg = ModelConfig {
            feature_size: 768,
            ..ModelConfig::default()
        };
        assert!(count_parameters(&cfg) < 500_000);
    }

    #[test]
    fn validation() {
        assert!(ModelConfig::default().validate().is_ok());
        let odd = ModelConfig {
            node_dim: 5,
            ..ModelConfig::default()
        };
        assert!(odd.validate().is_err());
        let no_layers = ModelConfig {
            gcn_layers: 0,
            ..ModelConfig::default()
        };
        assert!(no_layers.validate().is_err());
        let short_pe = ModelConfig {
            pe_max_len: 800,
            ..ModelConfig::default()
        };
        assert!(short_pe.check_camera(&CameraConfig::default()).is_err());
    }
}
