use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelConfig;
use crate::rng::Rng;

use super::config::TrainConfig;
use super::samples::Sample;
use super::trainer::train;

/// Ranges for random search. Integer ranges are inclusive; rates are
/// sampled log-uniformly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub gcn_layers: (usize, usize),
    pub lstm_layers: (usize, usize),
    pub gcn_hidden: Vec<usize>,
    pub lstm_hidden: Vec<usize>,
    pub lr: (f64, f64),
    pub weight_decay: (f64, f64),
    pub trials: usize,
    pub epochs_per_trial: usize,
}

impl Default for SearchSpace {
    fn default() -> Self {
        Self {
            gcn_layers: (1, 3),
            lstm_layers: (1, 2),
            gcn_hidden: vec![16, 32, 64],
            lstm_hidden: vec![32, 64, 128],
            lr: (3e-4, 1e-2),
            weight_decay: (1e-6, 1e-3),
            trials: 8,
            epochs_per_trial: 10,
        }
    }
}

impl SearchSpace {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(format!("search space: {m}")));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.epochs_per_trial == 0 {
            return bad("epochs_per_trial must be at least 1");
        }
        if self.gcn_layers.0 == 0 || self.gcn_layers.0 > self.gcn_layers.1 {
            return bad("gcn_layers must be a non-empty range starting at 1 or more");
        }
        if self.lstm_layers.0 == 0 || self.lstm_layers.0 > self.lstm_layers.1 {
            return bad("lstm_layers must be a non-empty range starting at 1 or more");
        }
        if self.gcn_hidden.is_empty() || self.lstm_hidden.is_empty() {
            return bad("hidden size choices must not be empty");
        }
        for (name, (lo, hi)) in [("lr", self.lr), ("weight_decay", self.weight_decay)] {
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                return bad(&format!("{name} range must satisfy 0 < lo <= hi"));
            }
        }
        Ok(())
    }

    fn sample(
        &self,
        rng: &mut Rng,
        base_model: &ModelConfig,
        base_train: &TrainConfig,
    ) -> (ModelConfig, TrainConfig) {
        let log_uniform = |rng: &mut Rng, (lo, hi): (f64, f64)| (rng.range(lo.ln(), hi.ln())).exp();
        let model = ModelConfig {
            gcn_layers: rng.int_inclusive(self.gcn_layers.0, self.gcn_layers.1),
            lstm_layers: rng.int_inclusive(self.lstm_layers.0, self.lstm_layers.1),
            gcn_hidden: self.gcn_hidden[rng.below(self.gcn_hidden.len() as u64) as usize],
            lstm_hidden: self.lstm_hidden[rng.below(self.lstm_hidden.len() as u64) as usize],
            ..*base_model
        };
        let train = TrainConfig {
            lr: log_uniform(rng, self.lr),
            weight_decay: log_uniform(rng, self.weight_decay),
            max_epochs: self.epochs_per_trial,
            ..base_train.clone()
        };
        (model, train)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub model: ModelConfig,
    pub train: TrainConfig,
    /// Best validation MSE, or `None` if the trial failed.
    pub val_mse: Option<f64>,
    pub epochs_run: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best_trial: usize,
    pub best_model: ModelConfig,
    pub best_train: TrainConfig,
    pub trials: Vec<TrialRecord>,
}

/// Seeded random search. Each trial trains from scratch for
/// `epochs_per_trial` epochs; the lowest validation MSE wins, ties to the
/// earlier trial. Failed trials are logged and skipped.
pub fn hyperparameter_search(
    space: &SearchSpace,
    base_model: &ModelConfig,
    base_train: &TrainConfig,
    train_set: &[Sample],
    val_set: &[Sample],
    seed: u64,
) -> Result<SearchResult> {
    space.validate()?;
    let trials: Vec<TrialRecord> = (0..space.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = Rng::with_stream(seed, t as u64);
            let (model, train_cfg) = space.sample(&mut rng, base_model, base_train);
            match train(&model, &train_cfg, train_set, val_set) {
                Ok(out) => TrialRecord {
                    trial: t,
                    model,
                    train: train_cfg,
                    val_mse: Some(out.best_val),
                    epochs_run: out.history.len(),
                    error: None,
                },
                Err(e) => {
                    log::warn!("trial {t} failed: {e}");
                    TrialRecord {
                        trial: t,
                        model,
                        train: train_cfg,
                        val_mse: None,
                        epochs_run: 0,
                        error: Some(e.to_string()),
                    }
                }
            }
        })
        .collect();
    let best = trials
        .iter()
        .filter_map(|r| r.val_mse.map(|v| (r, v)))
        .fold(None::<(&TrialRecord, f64)>, |acc, (r, v)| match acc {
            Some((_, bv)) if bv <= v => acc,
            _ => Some((r, v)),
        })
        .ok_or_else(|| Error::Search(format!("all {} trials failed", trials.len())))?
        .0;
    Ok(SearchResult {
        best_trial: best.trial,
        best_model: best.model,
        best_train: TrainConfig {
            max_epochs: base_train.max_epochs,
            ..best.train.clone()
        },
        trials: trials.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampled_configs_stay_in_range() {
        let space = SearchSpace::default();
        let base = ModelConfig::default();
        for t in 0..50 {
            let mut rng = Rng::with_stream(3, t);
            let (m, tr) = space.sample(&mut rng, &base, &TrainConfig::default());
            assert!((1..=3).contains(&m.gcn_layers));
            assert!((1..=2).contains(&m.lstm_layers));
            assert!(space.gcn_hidden.contains(&m.gcn_hidden));
            assert!(tr.lr >= 3e-4 && tr.lr <= 1e-2);
            assert!(tr.weight_decay >= 1e-6 && tr.weight_decay <= 1e-3);
            assert_eq!(tr.max_epochs, space.epochs_per_trial);
            m.validate().unwrap();
        }
    }

    #[test]
    fn invalid_space() {
        let space = SearchSpace {
            gcn_hidden: vec![],
            ..SearchSpace::default()
        };
        assert!(matches!(space.validate(), Err(Error::Config(_))));
    }
}
