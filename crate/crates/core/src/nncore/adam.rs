//! Adam with decoupled weight decay.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::matrix::Matrix;
use super::params::ParamSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub weight_decay: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamConfig {
    pub fn new(lr: f64, weight_decay: f64) -> Self {
        Self {
            lr,
            weight_decay,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// First and second moment estimates plus the step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub step: u64,
    m: Vec<Matrix>,
    v: Vec<Matrix>,
}

impl AdamState {
    pub fn new(params: &ParamSet) -> Self {
        Self {
            step: 0,
            m: params.zeros_like(),
            v: params.zeros_like(),
        }
    }
}

/// One optimizer step in place.
///
/// Weight decay is applied directly to the weights (`p ← p − lr·wd·p`),
/// separately from the moment-normalized gradient step.
pub fn adam_step(
    params: &mut ParamSet,
    grads: &[Matrix],
    state: &mut AdamState,
    cfg: &AdamConfig,
) -> Result<()> {
    if grads.len() != params.len() || state.m.len() != params.len() {
        return Err(Error::Config(format!(
            "adam_step: {} params, {} grads, {} moment slots",
            params.len(),
            grads.len(),
            state.m.len()
        )));
    }
    if !(cfg.lr >= 0.0) || !(cfg.weight_decay >= 0.0) {
        return Err(Error::Config(format!(
            "adam_step: lr = {}, weight_decay = {}",
            cfg.lr, cfg.weight_decay
        )));
    }
    for (i, g) in grads.iter().enumerate() {
        if g.shape() != params.value(i).shape() {
            return Err(Error::shape(
                "adam_step",
                params.value(i).shape(),
                g.shape(),
            ));
        }
        if !g.is_finite() {
            return Err(Error::Numeric(format!(
                "non-finite gradient for parameter `{}`",
                params.name(i)
            )));
        }
    }

    state.step += 1;
    let t = state.step as i32;
    let bias1 = 1.0 - cfg.beta1.powi(t);
    let bias2 = 1.0 - cfg.beta2.powi(t);
    for (i, g) in grads.iter().enumerate() {
        let m = state.m[i].as_mut_slice();
        let v = state.v[i].as_mut_slice();
        let p = params.value_mut(i).as_mut_slice();
        for k in 0..p.len() {
            let gk = g.as_slice()[k];
            m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * gk;
            v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * gk * gk;
            let m_hat = m[k] / bias1;
            let v_hat = v[k] / bias2;
            p[k] -= cfg.lr * cfg.weight_decay * p[k];
            p[k] -= cfg.lr * m_hat / (v_hat.sqrt() + cfg.eps);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(w: f64) -> ParamSet {
        let mut p = ParamSet::new();
        p.push("w", Matrix::filled(1, 1, w));
        p
    }

    #[test]
    fn zero_gradient_no_decay_is_noop() {
        let mut p = single(0.3);
        let mut s = AdamState::new(&p);
        adam_step(
            &mut p,
            &[Matrix::zeros(1, 1)],
            &mut s,
            &AdamConfig::new(0.1, 0.0),
        )
        .unwrap();
        assert_eq!(p.value(0).as_slice()[0], 0.3);
    }

    #[test]
    fn first_step_on_linear_objective() {
        // f(w) = w: gradient 1, m̂ = v̂ = 1 after bias correction.
        let mut p = single(0.0);
        let mut s = AdamState::new(&p);
        adam_step(
            &mut p,
            &[Matrix::filled(1, 1, 1.0)],
            &mut s,
            &AdamConfig::new(0.1, 0.0),
        )
        .unwrap();
        let expected = -0.1 / (1.0 + 1e-8);
        assert!((p.value(0).as_slice()[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn decoupled_decay_with_zero_gradient() {
        let mut p = single(1.0);
        let mut s = AdamState::new(&p);
        adam_step(
            &mut p,
            &[Matrix::zeros(1, 1)],
            &mut s,
            &AdamConfig::new(0.1, 0.01),
        )
        .unwrap();
        assert!((p.value(0).as_slice()[0] - 0.999).abs() < 1e-15);
    }

    #[test]
    fn non_finite_gradient_names_parameter() {
        let mut p = single(1.0);
        let mut s = AdamState::new(&p);
        let err = adam_step(
            &mut p,
            &[Matrix::filled(1, 1, f64::NAN)],
            &mut s,
            &AdamConfig::new(0.1, 0.0),
        )
        .unwrap_err();
        assert!(err.to_string().contains("`w`"), "{err}");
    }

    #[test]
    fn same_inputs_same_result() {
        let run = || {
            let mut p = single(0.7);
            let mut s = AdamState::new(&p);
            for k in 0..20 {
                let g = Matrix::filled(1, 1, (k as f64 * 0.37).sin());
                adam_step(&mut p, &[g], &mut s, &AdamConfig::new(0.01, 1e-3)).unwrap();
            }
            p.value(0).as_slice()[0]
        };
        assert_eq!(run().to_bits(), run().to_bits());
    }
}
