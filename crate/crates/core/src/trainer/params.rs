use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::PipelineConfig;
use crate::rules::SpectralRule;
use crate::spectral::{fit_chebyshev, softmax, BandGate, ChebyshevFilter, FrequencyResponse};
use crate::symbolic::{Tau, ThresholdConfig, ThresholdMode};

/// Learned filters are stored in rescaled coordinates and fitted over this
/// reference spectrum, which is exactly the normalized Laplacian's.
pub const REFERENCE_LAMBDA_MAX: f64 = 2.0;

/// Optimiser learning-rate group a parameter belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParamGroup {
    Spectral,
    Embedding,
}

/// Everything the trainer updates.
///
/// The same shape doubles as a gradient container.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainableParams {
    /// Chebyshev coefficients per band.
    pub bands: Vec<Vec<f64>>,
    pub query: Vec<f64>,
    pub signatures: Vec<Vec<f64>>,
    pub rule_weights: Vec<f64>,
    pub tau: Tau,
    pub alpha: f64,
}

impl TrainableParams {
    /// Low-pass start: a single band is the order-`K` fit of `1/(1+lambda)`;
    /// several bands start as fits of their indicators. Rule weights come
    /// from the rule set.
    pub fn init(cfg: &PipelineConfig, rules: &[SpectralRule]) -> Result<Self> {
        cfg.validate()?;
        let gate = BandGate::uniform_bands(cfg.bands, cfg.order, REFERENCE_LAMBDA_MAX, cfg.gate_width, cfg.seed)?;
        let bands = if cfg.bands == 1 {
            let low_pass = FrequencyResponse::LowPass { beta: 1.0 };
            vec![fit_chebyshev(&low_pass, cfg.order, REFERENCE_LAMBDA_MAX)?
                .coefficients()
                .to_vec()]
        } else {
            gate.filters.iter().map(|f| f.coefficients().to_vec()).collect()
        };
        let params = Self {
            bands,
            query: gate.query,
            signatures: gate.signatures,
            rule_weights: rules.iter().map(|r| r.weight).collect(),
            tau: Tau::Global(cfg.tau),
            alpha: cfg.alpha,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let order = self.bands.first().map(Vec::len).ok_or(Error::BadParams("no filter bands".into()))?;
        if order == 0 || self.bands.iter().any(|b| b.len() != order) {
            return Err(Error::MixedOrders);
        }
        if self.signatures.len() != self.bands.len() {
            return Err(Error::DimensionMismatch {
                expected: self.bands.len(),
                found: self.signatures.len(),
            });
        }
        if let Some(s) = self.signatures.iter().find(|s| s.len() != self.query.len()) {
            return Err(Error::DimensionMismatch {
                expected: self.query.len(),
                found: s.len(),
            });
        }
        for (name, _, values) in self.slots() {
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { what: name });
            }
        }
        if self.rule_weights.iter().any(|&w| w < 0.0) {
            return Err(Error::BadParams("rule weights must be >= 0".into()));
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.bands[0].len() - 1
    }

    pub fn band_count(&self) -> usize {
        self.bands.len()
    }

    /// Same shape, all zeros.
    pub fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        for (_, _, values) in z.slots_mut() {
            values.iter_mut().for_each(|v| *v = 0.0);
        }
        z
    }

    pub fn gate_weights(&self) -> Vec<f64> {
        let logits: Vec<f64> = self
            .signatures
            .iter()
            .map(|s| s.iter().zip(&self.query).map(|(a, b)| a * b).sum())
            .collect();
        softmax(&logits)
    }

    /// Gate-combined coefficients `theta* = sum_b alpha_b theta^(b)`.
    pub fn combined_theta(&self) -> Vec<f64> {
        let weights = self.gate_weights();
        let mut theta = vec![0.0; self.order() + 1];
        for (a, band) in weights.iter().zip(&self.bands) {
            for (t, c) in theta.iter_mut().zip(band) {
                *t += a * c;
            }
        }
        theta
    }

    pub fn filter(&self, lambda_max: f64) -> Result<ChebyshevFilter> {
        ChebyshevFilter::new(self.combined_theta(), lambda_max)
    }

    /// Rules with the learned weights substituted.
    pub fn weighted_rules(&self, rules: &[SpectralRule]) -> Result<Vec<SpectralRule>> {
        if rules.len() != self.rule_weights.len() {
            return Err(Error::DimensionMismatch {
                expected: rules.len(),
                found: self.rule_weights.len(),
            });
        }
        Ok(rules
            .iter()
            .zip(&self.rule_weights)
            .map(|(r, &w)| SpectralRule { weight: w, ..r.clone() })
            .collect())
    }

    pub fn threshold(&self, mode: ThresholdMode) -> ThresholdConfig {
        ThresholdConfig {
            mode,
            tau: self.tau.clone(),
            alpha: self.alpha,
        }
    }

    /// Named flat views, with their optimiser group. Order is stable and
    /// matches [`slots_mut`](Self::slots_mut).
    pub fn slots(&self) -> Vec<(String, ParamGroup, &[f64])> {
        let mut out: Vec<(String, ParamGroup, &[f64])> = Vec::new();
        for (b, band) in self.bands.iter().enumerate() {
            out.push((format!("theta[{b}]"), ParamGroup::Spectral, band));
        }
        out.push(("rule_weights".into(), ParamGroup::Spectral, &self.rule_weights));
        match &self.tau {
            Tau::Global(t) => out.push(("tau".into(), ParamGroup::Spectral, std::slice::from_ref(t))),
            Tau::PerNode(t) => out.push(("tau".into(), ParamGroup::Embedding, t)),
        }
        out.push(("alpha".into(), ParamGroup::Spectral, std::slice::from_ref(&self.alpha)));
        out.push(("query".into(), ParamGroup::Embedding, &self.query));
        for (b, s) in self.signatures.iter().enumerate() {
            out.push((format!("signature[{b}]"), ParamGroup::Embedding, s));
        }
        out
    }

    pub fn slots_mut(&mut self) -> Vec<(String, ParamGroup, &mut [f64])> {
        let mut out: Vec<(String, ParamGroup, &mut [f64])> = Vec::new();
        for (b, band) in self.bands.iter_mut().enumerate() {
            out.push((format!("theta[{b}]"), ParamGroup::Spectral, band));
        }
        out.push(("rule_weights".into(), ParamGroup::Spectral, &mut self.rule_weights));
        match &mut self.tau {
            Tau::Global(t) => out.push(("tau".into(), ParamGroup::Spectral, std::slice::from_mut(t))),
            Tau::PerNode(t) => out.push(("tau".into(), ParamGroup::Embedding, t)),
        }
        out.push(("alpha".into(), ParamGroup::Spectral, std::slice::from_mut(&mut self.alpha)));
        out.push(("query".into(), ParamGroup::Embedding, &mut self.query));
        for (b, s) in self.signatures.iter_mut().enumerate() {
            out.push((format!("signature[{b}]"), ParamGroup::Embedding, s));
        }
        out
    }

    /// Concatenation of all slots, for tests and finite differences.
    pub fn flatten(&self) -> Vec<f64> {
        self.slots().into_iter().flat_map(|(_, _, v)| v.to_vec()).collect()
    }

    pub fn unflatten(&mut self, flat: &[f64]) -> Result<()> {
        let total: usize = self.slots().iter().map(|(_, _, v)| v.len()).sum();
        if total != flat.len() {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: flat.len(),
            });
        }
        let mut offset = 0;
        for (_, _, values) in self.slots_mut() {
            values.copy_from_slice(&flat[offset..offset + values.len()]);
            offset += values.len();
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::uniform_grid;

    #[test]
    fn low_pass_init_is_non_increasing() {
        let p = TrainableParams::init(&PipelineConfig::default(), &[]).unwrap();
        let f = p.filter(REFERENCE_LAMBDA_MAX).unwrap();
        let grid = uniform_grid(REFERENCE_LAMBDA_MAX, 64);
        for pair in grid.windows(2) {
            assert!(f.response(pair[1]) <= f.response(pair[0]));
        }
        assert!((f.response(0.0) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn flatten_round_trips() {
        let cfg = PipelineConfig {
            bands: 3,
            ..PipelineConfig::default()
        };
        let p = TrainableParams::init(&cfg, &[]).unwrap();
        let mut q = p.zeros_like();
        q.unflatten(&p.flatten()).unwrap();
        assert_eq!(p, q);
        assert_eq!(p.band_count(), 3);
        assert_eq!(p.order(), 5);
    }

    #[test]
    fn single_band_combination_is_exact() {
        let p = TrainableParams::init(&PipelineConfig::default(), &[]).unwrap();
        assert_eq!(p.combined_theta(), p.bands[0]);
    }
}
