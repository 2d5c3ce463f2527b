use serde::{Deserialize, Serialize};

use super::params::{ParamGroup, TrainableParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr_spectral: f64,
    pub lr_embedding: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr_spectral: 5e-4,
            lr_embedding: 1e-5,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

impl AdamConfig {
    pub fn lr(&self, group: ParamGroup) -> f64 {
        match group {
            ParamGroup::Spectral => self.lr_spectral,
            ParamGroup::Embedding => self.lr_embedding,
        }
    }
}

/// Moment accumulators laid out like [`TrainableParams::slots`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerState {
    pub config: AdamConfig,
    pub step: u64,
    pub first: Vec<Vec<f64>>,
    pub second: Vec<Vec<f64>>,
}

impl OptimizerState {
    pub fn new(params: &TrainableParams, config: AdamConfig) -> Self {
        let zeros: Vec<Vec<f64>> = params.slots().iter().map(|(_, _, v)| vec![0.0; v.len()]).collect();
        Self {
            config,
            step: 0,
            first: zeros.clone(),
            second: zeros,
        }
    }
}

/// One bias-corrected Adam update with per-group learning rates. Rule
/// weights are clamped at zero afterwards. A non-finite gradient aborts the
/// step before anything is modified.
pub fn adam_step(params: &mut TrainableParams, grads: &TrainableParams, state: &mut OptimizerState) -> Result<()> {
    let grad_slots = grads.slots();
    let shapes_match = {
        let p = params.slots();
        p.len() == grad_slots.len()
            && p.len() == state.first.len()
            && p.iter()
                .zip(&grad_slots)
                .zip(&state.first)
                .all(|(((_, _, a), (_, _, b)), m)| a.len() == b.len() && a.len() == m.len())
    };
    if !shapes_match {
        return Err(Error::BadParams("gradient or optimizer state shape differs from parameters".into()));
    }
    for (name, _, g) in &grad_slots {
        if let Some(pos) = g.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteGradient {
                param: format!("{name}[{pos}]"),
            });
        }
    }
    state.step += 1;
    let cfg = state.config;
    let t = state.step as i32;
    let correct1 = 1.0 - cfg.beta1.powi(t);
    let correct2 = 1.0 - cfg.beta2.powi(t);
    for (slot, (_, group, values)) in params.slots_mut().into_iter().enumerate() {
        let lr = cfg.lr(group);
        let g = grad_slots[slot].2;
        let m = &mut state.first[slot];
        let v = &mut state.second[slot];
        for i in 0..values.len() {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            let m_hat = m[i] / correct1;
            let v_hat = v[i] / correct2;
            values[i] -= lr * m_hat / (v_hat.sqrt() + cfg.eps);
        }
    }
    for w in &mut params.rule_weights {
        *w = w.max(0.0);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::Tau;

    fn scalar(theta: f64) -> TrainableParams {
        TrainableParams {
            bands: vec![vec![theta]],
            query: vec![],
            signatures: vec![vec![]],
            rule_weights: vec![],
            tau: Tau::Global(0.0),
            alpha: 1.0,
        }
    }

    #[test]
    fn zero_gradient_leaves_params_unchanged() {
        let mut p = scalar(0.25);
        let before = p.clone();
        let mut state = OptimizerState::new(&p, AdamConfig::default());
        let zero = p.zeros_like();
        adam_step(&mut p, &zero, &mut state).unwrap();
        assert_eq!(p, before);
        assert_eq!(state.step, 1);
    }

    #[test]
    fn three_hand_computed_steps() {
        let cfg = AdamConfig {
            lr_spectral: 0.1,
            ..AdamConfig::default()
        };
        let mut p = scalar(1.0);
        let mut state = OptimizerState::new(&p, cfg);
        let grads = [0.5, -0.2, 0.3];
        let (mut m, mut v, mut x) = (0.0f64, 0.0f64, 1.0f64);
        for (k, &g) in grads.iter().enumerate() {
            let mut gp = p.zeros_like();
            gp.bands[0][0] = g;
            adam_step(&mut p, &gp, &mut state).unwrap();
            m = 0.9 * m + 0.1 * g;
            v = 0.999 * v + 0.001 * g * g;
            let t = (k + 1) as i32;
            x -= 0.1 * (m / (1.0 - 0.9f64.powi(t))) / ((v / (1.0 - 0.999f64.powi(t))).sqrt() + 1e-8);
            assert!((p.bands[0][0] - x).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_gradient_moves_at_learning_rate() {
        let mut p = scalar(0.0);
        let mut state = OptimizerState::new(&p, AdamConfig::default());
        let mut g = p.zeros_like();
        g.bands[0][0] = 3.0;
        let mut last = p.bands[0][0];
        for _ in 0..200 {
            adam_step(&mut p, &g, &mut state).unwrap();
            let delta = last - p.bands[0][0];
            assert!((delta - 5e-4).abs() < 1e-9);
            last = p.bands[0][0];
        }
    }

    #[test]
    fn non_finite_gradient_aborts() {
        let mut p = scalar(1.0);
        let mut state = OptimizerState::new(&p, AdamConfig::default());
        let mut g = p.zeros_like();
        g.alpha = f64::NAN;
        let err = adam_step(&mut p, &g, &mut state).unwrap_err();
        assert!(matches!(err, Error::NonFiniteGradient { ref param } if param == "alpha[0]"));
        assert_eq!(state.step, 0);
        assert_eq!(p, scalar(1.0));
    }

    #[test]
    fn rule_weights_clamped() {
        let mut p = scalar(0.0);
        p.rule_weights = vec![1e-5];
        let mut state = OptimizerState::new(&p, AdamConfig::default());
        let mut g = p.zeros_like();
        g.rule_weights[0] = 1.0;
        adam_step(&mut p, &g, &mut state).unwrap();
        assert_eq!(p.rule_weights[0], 0.0);
    }
}
