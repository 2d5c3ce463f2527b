//! Softmax band gating over per-band Chebyshev filters.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::chebyshev::{fit_chebyshev, ChebyshevFilter};
use super::response::FrequencyResponse;
use crate::error::{Error, Result};

/// Default width of the gate query and band signature vectors.
pub const DEFAULT_GATE_WIDTH: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandGate {
    pub filters: Vec<ChebyshevFilter>,
    pub signatures: Vec<Vec<f64>>,
    pub query: Vec<f64>,
}

impl BandGate {
    pub fn new(filters: Vec<ChebyshevFilter>, signatures: Vec<Vec<f64>>, query: Vec<f64>) -> Result<Self> {
        if filters.is_empty() {
            return Err(Error::BadParams("band gate needs at least one band".into()));
        }
        if signatures.len() != filters.len() {
            return Err(Error::DimensionMismatch {
                expected: filters.len(),
                found: signatures.len(),
            });
        }
        if let Some(bad) = signatures.iter().find(|s| s.len() != query.len()) {
            return Err(Error::DimensionMismatch {
                expected: query.len(),
                found: bad.len(),
            });
        }
        Ok(Self {
            filters,
            signatures,
            query,
        })
    }

    /// `B` bands tiling `[0, lambda_max]` uniformly, each initialised to a
    /// degree-`order` fit of its indicator; gate vectors drawn from a seeded
    /// standard normal.
    pub fn uniform_bands(bands: usize, order: usize, lambda_max: f64, width: usize, seed: u64) -> Result<Self> {
        if bands == 0 {
            return Err(Error::BadParams("band count must be at least 1".into()));
        }
        let filters = (0..bands)
            .map(|b| {
                let lo = lambda_max * b as f64 / bands as f64;
                let hi = lambda_max * (b + 1) as f64 / bands as f64;
                let last = b + 1 == bands;
                let indicator = FrequencyResponse::custom(move |l| {
                    if l >= lo && (l < hi || (last && l <= hi)) {
                        1.0
                    } else {
                        0.0
                    }
                });
                fit_chebyshev(&indicator, order, lambda_max)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |n: usize| -> Vec<f64> {
            (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
        };
        let query = draw(width);
        let signatures = (0..bands).map(|_| draw(width)).collect();
        Self::new(filters, signatures, query)
    }

    pub fn band_count(&self) -> usize {
        self.filters.len()
    }

    pub fn logits(&self) -> Vec<f64> {
        self.signatures
            .iter()
            .map(|s| s.iter().zip(&self.query).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `alpha_b = softmax(q . s_b)`.
    pub fn weights(&self) -> Vec<f64> {
        softmax(&self.logits())
    }
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Collapse the gate into one filter: `theta*_k = sum_b alpha_b theta^(b)_k`.
pub fn band_gate_combine(gate: &BandGate) -> Result<ChebyshevFilter> {
    let first = &gate.filters[0];
    for f in &gate.filters[1..] {
        if f.order() != first.order() {
            return Err(Error::MixedOrders);
        }
        if (f.lambda_max() - first.lambda_max()).abs() > 1e-12 * first.lambda_max() {
            return Err(Error::MixedLambdaMax);
        }
    }
    let alpha = gate.weights();
    let mut theta = vec![0.0; first.order() + 1];
    for (a, f) in alpha.iter().zip(&gate.filters) {
        for (t, c) in theta.iter_mut().zip(f.coefficients()) {
            *t += a * c;
        }
    }
    ChebyshevFilter::new(theta, first.lambda_max())
}
