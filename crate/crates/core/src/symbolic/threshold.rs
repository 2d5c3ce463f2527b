//! Projection of filtered belief signals onto predicates.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdMode {
    Hard,
    Logistic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tau {
    Global(f64),
    PerNode(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdConfig {
    pub mode: ThresholdMode,
    pub tau: Tau,
    /// Logistic steepness; ignored in hard mode.
    pub alpha: f64,
}

impl ThresholdConfig {
    pub fn hard(tau: f64) -> Self {
        Self {
            mode: ThresholdMode::Hard,
            tau: Tau::Global(tau),
            alpha: 1.0,
        }
    }

    pub fn logistic(tau: Tau, alpha: f64) -> Result<Self> {
        let cfg = Self {
            mode: ThresholdMode::Logistic,
            tau,
            alpha,
        };
        cfg.validate(None)?;
        Ok(cfg)
    }

    pub fn validate(&self, n: Option<usize>) -> Result<()> {
        if self.mode == ThresholdMode::Logistic && !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::BadParams(format!("alpha must be positive, got {}", self.alpha)));
        }
        if let (Tau::PerNode(t), Some(n)) = (&self.tau, n) {
            check_len(n, t.len())?;
        }
        Ok(())
    }

    pub fn tau_at(&self, i: usize) -> f64 {
        match &self.tau {
            Tau::Global(t) => *t,
            Tau::PerNode(t) => t[i],
        }
    }

    /// Apply according to the configured mode.
    pub fn apply(&self, y: &[f64]) -> Result<PredicateSet> {
        match self.mode {
            ThresholdMode::Hard => hard_threshold(y, self),
            ThresholdMode::Logistic => soft_threshold(y, self),
        }
    }
}

/// Per-node truth assignment: hard booleans or soft probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PredicateSet {
    Hard(Vec<bool>),
    Soft(Vec<f64>),
}

impl PredicateSet {
    pub fn len(&self) -> usize {
        match self {
            PredicateSet::Hard(v) => v.len(),
            PredicateSet::Soft(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Hard truth values; soft values are cut at 0.5 (strictly above is true).
    pub fn truth(&self) -> Vec<bool> {
        match self {
            PredicateSet::Hard(v) => v.clone(),
            PredicateSet::Soft(v) => v.iter().map(|&p| p > 0.5).collect(),
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        match self {
            PredicateSet::Hard(v) => v.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
            PredicateSet::Soft(v) => v.clone(),
        }
    }
}

/// `p_i = [y_i > tau_i]`; ties are false.
pub fn hard_threshold(y: &[f64], cfg: &ThresholdConfig) -> Result<PredicateSet> {
    if let Tau::PerNode(t) = &cfg.tau {
        check_len(y.len(), t.len())?;
    }
    Ok(PredicateSet::Hard(
        y.iter().enumerate().map(|(i, &v)| v > cfg.tau_at(i)).collect(),
    ))
}

/// `p_i = sigmoid(alpha (y_i - tau_i))`.
pub fn soft_threshold(y: &[f64], cfg: &ThresholdConfig) -> Result<PredicateSet> {
    cfg.validate(Some(y.len()))?;
    if !(cfg.alpha > 0.0) {
        return Err(Error::BadParams(format!("alpha must be positive, got {}", cfg.alpha)));
    }
    Ok(PredicateSet::Soft(
        y.iter()
            .enumerate()
            .map(|(i, &v)| sigmoid(cfg.alpha * (v - cfg.tau_at(i))))
            .collect(),
    ))
}

/// Logistic function that never evaluates `exp` of a large positive number.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hard_basic_and_ties() {
        let cfg = ThresholdConfig::hard(0.5);
        assert_eq!(hard_threshold(&[0.9, 0.1], &cfg).unwrap(), PredicateSet::Hard(vec![true, false]));
        assert_eq!(hard_threshold(&[0.5], &cfg).unwrap(), PredicateSet::Hard(vec![false]));
    }

    #[test]
    fn per_node_tau() {
        let cfg = ThresholdConfig {
            mode: ThresholdMode::Hard,
            tau: Tau::PerNode(vec![0.0, 1.0]),
            alpha: 1.0,
        };
        assert_eq!(hard_threshold(&[0.5, 0.5], &cfg).unwrap().truth(), vec![true, false]);
        assert!(hard_threshold(&[0.5], &cfg).is_err());
    }

    #[test]
    fn soft_values() {
        let cfg = ThresholdConfig::logistic(Tau::Global(0.25), 2.0).unwrap();
        let p = soft_threshold(&[0.25, 0.75], &cfg).unwrap().probabilities();
        assert_eq!(p[0], 0.5);
        assert!((p[1] - 0.7310585786300049).abs() < 1e-15);
        assert!(ThresholdConfig::logistic(Tau::Global(0.0), 0.0).is_err());
    }

    #[test]
    fn sigmoid_saturates_without_overflow() {
        assert!(sigmoid(14.0) >= 1.0 - 1e-6);
        assert_eq!(sigmoid(-1e6), 0.0);
        assert_eq!(sigmoid(1e6), 1.0);
        assert!(sigmoid(-800.0).is_finite());
    }

    #[test]
    fn soft_cut_matches_hard() {
        let soft = PredicateSet::Soft(vec![0.5, 0.5000001, 0.2]);
        assert_eq!(soft.truth(), vec![false, true, false]);
    }
}
