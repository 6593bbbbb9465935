use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{forward, ModelParams};
use crate::scenegen::{GroundPoint, ScenarioKind};

use super::samples::Sample;

/// Squared error averaged over x and y, in m².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub mse_overall: f64,
    pub mse_per_step: Vec<f64>,
    pub n_samples: usize,
}

impl Metrics {
    /// Aggregates `(predicted, target)` pairs of equal length `H`.
    ///
    /// Both sides may be absolute or both relative; only differences matter.
    pub fn from_pairs(pairs: &[(Vec<GroundPoint>, Vec<GroundPoint>)]) -> Result<Self> {
        let Some(first) = pairs.first() else {
            return Err(Error::Input(
                "cannot compute metrics over zero samples".into(),
            ));
        };
        let h = first.1.len();
        let mut per_step = vec![0.0; h];
        for (i, (pred, truth)) in pairs.iter().enumerate() {
            if pred.len() != h || truth.len() != h {
                return Err(Error::Input(format!(
                    "sample {i}: expected {h} steps, got {} predicted and {} true",
                    pred.len(),
                    truth.len()
                )));
            }
            for (j, (p, t)) in pred.iter().zip(truth).enumerate() {
                let dx = p.x - t.x;
                let dy = p.y - t.y;
                per_step[j] += 0.5 * (dx * dx + dy * dy);
            }
        }
        let n = pairs.len() as f64;
        for v in &mut per_step {
            *v /= n;
        }
        let overall = per_step.iter().sum::<f64>() / h.max(1) as f64;
        if !overall.is_finite() {
            return Err(Error::Numeric("metrics are not finite".into()));
        }
        Ok(Self {
            mse_overall: overall,
            mse_per_step: per_step,
            n_samples: pairs.len(),
        })
    }
}

/// Relative model predictions for each sample, in sample order.
pub fn predict_samples(params: &ModelParams, samples: &[Sample]) -> Result<Vec<Vec<GroundPoint>>> {
    samples
        .par_iter()
        .map(|s| {
            let origin = s.origin();
            forward(&s.graph_refs(), params, origin).map(|p| p.relative_to(origin))
        })
        .collect()
}

pub fn evaluate(params: &ModelParams, samples: &[Sample]) -> Result<Metrics> {
    let preds = predict_samples(params, samples)?;
    let pairs: Vec<_> = preds
        .into_iter()
        .zip(samples)
        .map(|(p, s)| (p, s.target.clone()))
        .collect();
    Metrics::from_pairs(&pairs)
}

/// Constant-velocity extrapolation from the last two observed ego positions.
pub fn persistence_prediction(sample: &Sample) -> Vec<GroundPoint> {
    let w = &sample.ego_window;
    let v = if w.len() >= 2 {
        w[w.len() - 1] - w[w.len() - 2]
    } else {
        GroundPoint::new(0.0, 0.0)
    };
    (1..=sample.target.len())
        .map(|j| GroundPoint::new(v.x * j as f64, v.y * j as f64))
        .collect()
}

pub fn baseline_persistence(samples: &[Sample]) -> Result<Metrics> {
    let pairs: Vec<_> = samples
        .iter()
        .map(|s| (persistence_prediction(s), s.target.clone()))
        .collect();
    Metrics::from_pairs(&pairs)
}

/// Samples of the given scenario kinds.
pub fn filter_scenarios(samples: &[Sample], kinds: &[ScenarioKind]) -> Vec<Sample> {
    samples
        .iter()
        .filter(|s| kinds.contains(&s.scenario))
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gp(x: f64, y: f64) -> GroundPoint {
        GroundPoint::new(x, y)
    }

    #[test]
    fn perfect_prediction_is_zero() {
        let t = vec![gp(1.0, 2.0), gp(3.0, 4.0)];
        let m = Metrics::from_pairs(&[(t.clone(), t)]).unwrap();
        assert_eq!(m.mse_overall, 0.0);
        assert_eq!(m.mse_per_step, vec![0.0, 0.0]);
    }

    #[test]
    fn per_step_values() {
        let pairs = vec![
            (
                vec![gp(1.0, 0.0), gp(0.0, 2.0)],
                vec![gp(0.0, 0.0), gp(0.0, 0.0)],
            ),
            (
                vec![gp(0.0, 0.0), gp(0.0, 0.0)],
                vec![gp(0.0, 1.0), gp(2.0, 0.0)],
            ),
        ];
        let m = Metrics::from_pairs(&pairs).unwrap();
        assert_eq!(m.mse_per_step, vec![0.5, 2.0]);
        assert_eq!(m.mse_overall, 1.25);
        assert_eq!(m.n_samples, 2);
    }

    #[test]
    fn empty_and_ragged() {
        assert!(Metrics::from_pairs(&[]).is_err());
        let bad = vec![(vec![gp(0.0, 0.0)], vec![gp(0.0, 0.0), gp(0.0, 0.0)])];
        assert!(Metrics::from_pairs(&bad).is_err());
    }
}
