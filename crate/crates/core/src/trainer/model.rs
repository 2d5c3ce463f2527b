//! Differentiable forward pass used for training. Stage 2 is linear in the
//! rule weights, so rule outputs are computed once per task and reweighted.

use super::grad::{
    grad_gate, grad_rule_weights, grad_theta_from_terms, grad_threshold, loss, loss_gradient, Labels,
};
use super::params::TrainableParams;
use crate::error::{check_len, Error, Result};
use crate::graph::ReasoningGraph;
use crate::pipeline::{Pipeline, PipelineConfig};
use crate::rules::{apply_rule, rule_operator, SpectralRule};
use crate::spectral::{chebyshev_terms, combine_terms, GraphSignal, SpectralContext};
use crate::symbolic::{soft_threshold, PredicateSet, ThresholdMode};

#[derive(Debug, Clone)]
pub struct PreparedTask {
    pub ctx: SpectralContext,
    /// Part of `b'` independent of rule weights (pass-through outside a
    /// scope, or `x0` itself without rules).
    pub offset: Vec<f64>,
    /// Unweighted `Phi_r x0` per rule.
    pub rule_signals: Vec<Vec<f64>>,
    pub labels: Labels,
}

pub fn prepare_task(
    cfg: &PipelineConfig,
    rules: &[SpectralRule],
    graph: &ReasoningGraph,
    x0: &GraphSignal,
    labels: &Labels,
) -> Result<PreparedTask> {
    let n = graph.node_count();
    check_len(n, x0.len())?;
    if rules.len() > 1 && rules.iter().any(|r| r.scope.is_some()) {
        return Err(Error::MixedScopes);
    }
    let pipeline = Pipeline::new(cfg.clone(), rules.to_vec())?;
    let ctx = pipeline.context(graph)?;
    let path = Pipeline::rule_path(&ctx);
    let mut offset = if rules.is_empty() { x0.values().to_vec() } else { vec![0.0; n] };
    let mut rule_signals = Vec::with_capacity(rules.len());
    for rule in rules {
        let unit = SpectralRule { weight: 1.0, ..rule.clone() };
        let mut s = apply_rule(&rule_operator(&ctx, &unit, path)?, x0)?.into_values();
        if let Some(scope) = &rule.scope {
            let inside: std::collections::BTreeSet<usize> = scope.iter().copied().collect();
            for i in 0..n {
                if !inside.contains(&i) {
                    offset[i] = x0.values()[i];
                    s[i] = 0.0;
                }
            }
        }
        rule_signals.push(s);
    }
    Ok(PreparedTask {
        ctx,
        offset,
        rule_signals,
        labels: labels.clone(),
    })
}

#[derive(Debug, Clone)]
pub struct ForwardPass {
    pub rule_output: Vec<f64>,
    pub terms: Vec<Vec<f64>>,
    pub theta: Vec<f64>,
    pub filtered: Vec<f64>,
    pub predicates: PredicateSet,
}

/// Soft forward pass: rules, learned filter, logistic projection.
pub fn forward(params: &TrainableParams, task: &PreparedTask) -> Result<ForwardPass> {
    check_len(task.rule_signals.len(), params.rule_weights.len())?;
    let mut rule_output = task.offset.clone();
    for (w, s) in params.rule_weights.iter().zip(&task.rule_signals) {
        for (b, v) in rule_output.iter_mut().zip(s) {
            *b += w * v;
        }
    }
    let terms = chebyshev_terms(task.ctx.laplacian(), task.ctx.lambda_max(), params.order(), &rule_output)?;
    let theta = params.combined_theta();
    let filtered = combine_terms(&theta, &terms);
    let predicates = soft_threshold(&filtered, &params.threshold(ThresholdMode::Logistic))?;
    Ok(ForwardPass {
        rule_output,
        terms,
        theta,
        filtered,
        predicates,
    })
}

/// Task loss and its gradient with respect to every parameter.
pub fn task_loss_and_grad(params: &TrainableParams, task: &PreparedTask) -> Result<(f64, TrainableParams)> {
    let fwd = forward(params, task)?;
    let value = loss(&fwd.predicates, &task.labels)?;
    let d_p = loss_gradient(&fwd.predicates, &task.labels)?;
    let threshold = grad_threshold(&fwd.filtered, &params.threshold(ThresholdMode::Logistic), &d_p)?;
    let d_theta = grad_theta_from_terms(&fwd.terms, &threshold.y);
    let gate = grad_gate(&params.bands, &params.signatures, &params.query, &d_theta)?;
    let rule_weights = if task.rule_signals.is_empty() {
        Vec::new()
    } else {
        let filter = params.filter(task.ctx.lambda_max())?;
        let upstream = GraphSignal::vertex(threshold.y.clone())?;
        grad_rule_weights(task.ctx.laplacian(), &filter, &task.rule_signals, &upstream)?
    };
    let mut grads = params.zeros_like();
    grads.bands = gate.bands;
    grads.query = gate.query;
    grads.signatures = gate.signatures;
    grads.rule_weights = rule_weights;
    match &mut grads.tau {
        crate::symbolic::Tau::Global(t) => *t = threshold.tau[0],
        crate::symbolic::Tau::PerNode(t) => t.copy_from_slice(&threshold.tau),
    }
    grads.alpha = threshold.alpha;
    Ok((value, grads))
}

/// Mean task loss and gradient over a batch, reduced in batch order.
pub fn batch_loss_and_grad(params: &TrainableParams, batch: &[&PreparedTask]) -> Result<(f64, TrainableParams)> {
    if batch.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut total = 0.0;
    let mut acc = params.zeros_like().flatten();
    for task in batch {
        let (value, grads) = task_loss_and_grad(params, task)?;
        total += value;
        for (a, g) in acc.iter_mut().zip(grads.flatten()) {
            *a += g;
        }
    }
    let scale = 1.0 / batch.len() as f64;
    acc.iter_mut().for_each(|a| *a *= scale);
    let mut grads = params.zeros_like();
    grads.unflatten(&acc)?;
    Ok((total * scale, grads))
}

