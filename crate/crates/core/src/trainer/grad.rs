//! Binary cross-entropy and closed-form gradients of every trainable piece.

use std::collections::BTreeMap;

use crate::error::{check_len, Error, Result};
use crate::laplacian::Laplacian;
use crate::spectral::{chebyshev_filter, chebyshev_terms, ChebyshevFilter, GraphSignal};
use crate::symbolic::{PredicateSet, Tau, ThresholdConfig};

pub const PROB_CLIP: f64 = 1e-7;

/// Node id to binary label.
pub type Labels = BTreeMap<usize, bool>;

fn check_labels(n: usize, labels: &Labels) -> Result<()> {
    if labels.is_empty() {
        return Err(Error::EmptyLabels);
    }
    match labels.keys().next_back() {
        Some(&last) if last >= n => Err(Error::IndexOutOfRange { index: last, len: n }),
        _ => Ok(()),
    }
}

fn bce(p: f64, label: bool) -> f64 {
    let p = p.clamp(PROB_CLIP, 1.0 - PROB_CLIP);
    if label {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}

/// Mean binary cross-entropy over the labeled nodes.
pub fn loss(p: &PredicateSet, labels: &Labels) -> Result<f64> {
    check_labels(p.len(), labels)?;
    let probs = p.probabilities();
    let total: f64 = labels.iter().map(|(&i, &l)| bce(probs[i], l)).sum();
    Ok(total / labels.len() as f64)
}

/// `d loss / d p_i` for every node (zero off the label set and wherever the
/// clip is active).
pub fn loss_gradient(p: &PredicateSet, labels: &Labels) -> Result<Vec<f64>> {
    check_labels(p.len(), labels)?;
    let probs = p.probabilities();
    let scale = 1.0 / labels.len() as f64;
    let mut grad = vec![0.0; probs.len()];
    for (&i, &l) in labels {
        let q = probs[i];
        if q < PROB_CLIP || q > 1.0 - PROB_CLIP {
            continue;
        }
        grad[i] = scale * if l { -1.0 / q } else { 1.0 / (1.0 - q) };
    }
    Ok(grad)
}

/// `d loss / d theta_k = <upstream, T_k(L~) x>`.
pub fn grad_theta(
    l: &Laplacian,
    lambda_max: f64,
    order: usize,
    x: &GraphSignal,
    upstream: &GraphSignal,
) -> Result<Vec<f64>> {
    check_len(x.len(), upstream.len())?;
    let terms = chebyshev_terms(l, lambda_max, order, x.values())?;
    Ok(grad_theta_from_terms(&terms, upstream.values()))
}

/// Same as [`grad_theta`] with the forward pass's recurrence terms.
pub fn grad_theta_from_terms(terms: &[Vec<f64>], upstream: &[f64]) -> Vec<f64> {
    terms.iter().map(|t| dot(t, upstream)).collect()
}

/// `d loss / d w_r = <h(L) upstream, Phi_r x>`; `h(L)` is symmetric so the
/// backward pass is one more filter application.
pub fn grad_rule_weights(
    l: &Laplacian,
    filter: &ChebyshevFilter,
    rule_signals: &[Vec<f64>],
    upstream: &GraphSignal,
) -> Result<Vec<f64>> {
    let back = chebyshev_filter(l, filter, upstream)?;
    rule_signals
        .iter()
        .map(|s| {
            check_len(back.len(), s.len())?;
            Ok(dot(back.values(), s))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateGradient {
    pub query: Vec<f64>,
    pub signatures: Vec<Vec<f64>>,
    pub bands: Vec<Vec<f64>>,
}

/// Back-propagate `d loss / d theta*` through
/// `theta* = sum_b softmax(q . s)_b theta^(b)`.
pub fn grad_gate(
    bands: &[Vec<f64>],
    signatures: &[Vec<f64>],
    query: &[f64],
    d_theta_star: &[f64],
) -> Result<GateGradient> {
    check_len(bands.len(), signatures.len())?;
    let logits: Vec<f64> = signatures
        .iter()
        .map(|s| {
            check_len(query.len(), s.len())?;
            Ok(dot(s, query))
        })
        .collect::<Result<_>>()?;
    let weights = crate::spectral::softmax(&logits);
    let mut d_weight = Vec::with_capacity(bands.len());
    for band in bands {
        check_len(d_theta_star.len(), band.len())?;
        d_weight.push(dot(band, d_theta_star));
    }
    let mean: f64 = weights.iter().zip(&d_weight).map(|(a, d)| a * d).sum();
    let d_logit: Vec<f64> = weights.iter().zip(&d_weight).map(|(a, d)| a * (d - mean)).collect();
    let mut d_query = vec![0.0; query.len()];
    for (dz, s) in d_logit.iter().zip(signatures) {
        for (dq, si) in d_query.iter_mut().zip(s) {
            *dq += dz * si;
        }
    }
    let d_signatures = d_logit
        .iter()
        .map(|dz| query.iter().map(|q| dz * q).collect())
        .collect();
    let d_bands = weights
        .iter()
        .map(|a| d_theta_star.iter().map(|d| a * d).collect())
        .collect();
    Ok(GateGradient {
        query: d_query,
        signatures: d_signatures,
        bands: d_bands,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdGradient {
    /// `d loss / d y`.
    pub y: Vec<f64>,
    /// One entry for a global threshold, one per node otherwise.
    pub tau: Vec<f64>,
    pub alpha: f64,
}

/// Chain `d loss / d p` through `p = sigmoid(alpha (y - tau))`.
pub fn grad_threshold(y: &[f64], cfg: &ThresholdConfig, d_p: &[f64]) -> Result<ThresholdGradient> {
    check_len(y.len(), d_p.len())?;
    cfg.validate(Some(y.len()))?;
    let mut d_y = vec![0.0; y.len()];
    let mut d_tau = match &cfg.tau {
        Tau::Global(_) => vec![0.0],
        Tau::PerNode(t) => vec![0.0; t.len()],
    };
    let mut d_alpha = 0.0;
    for (i, (&yi, &g)) in y.iter().zip(d_p).enumerate() {
        if g == 0.0 {
            continue;
        }
        let centred = yi - cfg.tau_at(i);
        let p = crate::symbolic::sigmoid(cfg.alpha * centred);
        let dz = g * p * (1.0 - p);
        d_y[i] = dz * cfg.alpha;
        let slot = if d_tau.len() == 1 { 0 } else { i };
        d_tau[slot] -= dz * cfg.alpha;
        d_alpha += dz * centred;
    }
    Ok(ThresholdGradient {
        y: d_y,
        tau: d_tau,
        alpha: d_alpha,
    })
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn max_entropy_loss_is_ln2() {
        let p = PredicateSet::Soft(vec![0.5; 6]);
        let labels: Labels = [(0, true), (3, false), (5, true)].into_iter().collect();
        assert!((loss(&p, &labels).unwrap() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn perfect_predictions_hit_the_clip() {
        let p = PredicateSet::Soft(vec![1.0, 0.0]);
        let labels: Labels = [(0, true), (1, false)].into_iter().collect();
        let l = loss(&p, &labels).unwrap();
        assert!(l > 0.0 && l < 2e-7);
        assert_eq!(loss_gradient(&p, &labels).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn empty_labels_rejected() {
        let p = PredicateSet::Soft(vec![0.5]);
        assert!(matches!(loss(&p, &Labels::new()), Err(Error::EmptyLabels)));
        let out_of_range: Labels = [(4, true)].into_iter().collect();
        assert!(loss(&p, &out_of_range).is_err());
    }

    #[test]
    fn single_band_gate_has_no_gate_gradient() {
        let g = grad_gate(&[vec![0.3, -0.2]], &[vec![1.0, 2.0]], &[0.5, -0.1], &[0.7, 0.4]).unwrap();
        assert_eq!(g.query, vec![0.0, 0.0]);
        assert_eq!(g.signatures, vec![vec![0.0, 0.0]]);
        assert_eq!(g.bands, vec![vec![0.7, 0.4]]);
    }

    #[test]
    fn symmetric_gate_has_zero_query_gradient() {
        let band = vec![0.4, 0.1, -0.3];
        let g = grad_gate(
            &[band.clone(), band],
            &[vec![1.0, -1.0], vec![-1.0, 1.0]],
            &[0.0, 0.0],
            &[1.0, 2.0, 3.0],
        )
        .unwrap();
        assert!(g.query.iter().all(|v| v.abs() < 1e-15));
    }
}
