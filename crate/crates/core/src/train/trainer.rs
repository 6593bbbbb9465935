use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{predict_relative, Checkpoint, ModelConfig, ModelParams};
use crate::nncore::{adam_step, AdamConfig, AdamState, Matrix, Tape};
use crate::rng::Rng;

use super::config::{EpochRecord, TrainConfig};
use super::metrics::evaluate;
use super::samples::Sample;

/// Result of a training run; `params` are the best-validation parameters.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: ModelParams,
    pub history: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub best_val: f64,
}

impl TrainOutcome {
    pub fn into_checkpoint(self, train_config: TrainConfig) -> Checkpoint {
        Checkpoint {
            params: self.params,
            train_config,
            history: self.history,
            best_epoch: self.best_epoch,
        }
    }
}

/// Loss and parameter gradients for one sample.
pub fn sample_loss_and_grads(params: &ModelParams, sample: &Sample) -> Result<(f64, Vec<Matrix>)> {
    let cfg = params.config();
    let mut tape = Tape::new();
    let bound = params.bind(&mut tape)?;
    let pred = predict_relative(&mut tape, &bound, &sample.graph_refs(), cfg)?;
    let target = target_matrix(sample);
    let target = tape.constant(target);
    let loss = tape.mse(target, pred)?;
    tape.backward(loss)?;
    let grads = bound
        .leaves
        .iter()
        .map(|&v| tape.grad_or_zeros(v))
        .collect();
    Ok((tape.scalar(loss), grads))
}

fn target_matrix(sample: &Sample) -> Matrix {
    let mut m = Matrix::zeros(sample.target.len(), 2);
    for (j, p) in sample.target.iter().enumerate() {
        m[(j, 0)] = p.x;
        m[(j, 1)] = p.y;
    }
    m
}

/// Mean loss and mean gradients over a batch, summed in batch order.
fn batch_gradients(params: &ModelParams, batch: &[&Sample]) -> Result<(f64, Vec<Matrix>)> {
    let per_sample: Vec<(f64, Vec<Matrix>)> = batch
        .par_iter()
        .map(|s| sample_loss_and_grads(params, s))
        .collect::<Result<_>>()?;
    let mut total = params.set().zeros_like();
    let mut loss = 0.0;
    for (l, grads) in &per_sample {
        loss += l;
        for (acc, g) in total.iter_mut().zip(grads) {
            acc.add_assign(g)?;
        }
    }
    let inv = 1.0 / batch.len() as f64;
    for g in &mut total {
        g.scale_assign(inv);
    }
    Ok((loss, total))
}

/// Adam over shuffled minibatches with early stopping on validation MSE.
pub fn train(
    model_config: &ModelConfig,
    cfg: &TrainConfig,
    train_set: &[Sample],
    val_set: &[Sample],
) -> Result<TrainOutcome> {
    model_config.validate()?;
    cfg.validate()?;
    if train_set.is_empty() {
        return Err(Error::Config("training set has no samples".into()));
    }
    if val_set.is_empty() {
        return Err(Error::Config("validation set has no samples".into()));
    }
    let mut params = ModelParams::init(model_config)?;
    train_from(&mut params, cfg, train_set, val_set)
}

/// Same as [`train`] but starting from the given parameters.
pub fn train_from(
    params: &mut ModelParams,
    cfg: &TrainConfig,
    train_set: &[Sample],
    val_set: &[Sample],
) -> Result<TrainOutcome> {
    cfg.validate()?;
    let adam = AdamConfig::new(cfg.lr, cfg.weight_decay);
    let mut state = AdamState::new(params.set());
    let mut rng = Rng::with_stream(cfg.seed, 0x7a1);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut history = Vec::new();
    let mut best: Option<(usize, f64, ModelParams)> = None;

    for epoch in 1..=cfg.max_epochs {
        rng.shuffle(&mut order);
        let mut loss_sum = 0.0;
        for (b, chunk) in order.chunks(cfg.batch_size).enumerate() {
            let batch: Vec<&Sample> = chunk.iter().map(|&i| &train_set[i]).collect();
            let (loss, grads) = batch_gradients(params, &batch)
                .map_err(|e| Error::Numeric(format!("epoch {epoch} batch {b}: {e}")))?;
            if !loss.is_finite() {
                return Err(Error::Numeric(format!(
                    "epoch {epoch} batch {b}: loss is {loss}"
                )));
            }
            loss_sum += loss;
            adam_step(params.set_mut(), &grads, &mut state, &adam)
                .map_err(|e| Error::Numeric(format!("epoch {epoch} batch {b}: {e}")))?;
        }
        let train_loss = loss_sum / train_set.len() as f64;
        let val_loss = evaluate(params, val_set)
            .map_err(|e| Error::Numeric(format!("epoch {epoch} validation: {e}")))?
            .mse_overall;
        let record = EpochRecord {
            epoch,
            train_loss,
            val_loss,
        };
        log::info!("epoch {epoch}: train {train_loss:.6} val {val_loss:.6}");
        history.push(record);
        if best.as_ref().is_none_or(|(_, v, _)| val_loss < *v) {
            best = Some((epoch, val_loss, params.clone()));
        }
        let best_epoch = best.as_ref().map(|b| b.0).unwrap_or(epoch);
        if epoch - best_epoch >= cfg.early_stop_tolerance {
            log::info!("early stop at epoch {epoch}, best epoch {best_epoch}");
            break;
        }
    }
    let (best_epoch, best_val, best_params) = best.expect("at least one epoch");
    Ok(TrainOutcome {
        params: best_params,
        history,
        best_epoch,
        best_val,
    })
}
