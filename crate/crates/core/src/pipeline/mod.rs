//! The three-stage pipeline: graph spectrum, rules then learned filter,
//! thresholding into a knowledge base and forward chaining.

mod config;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use config::{ConfigMap, FilterPath, PipelineConfig, SEED_ENV};

use crate::error::{check_len, Error, Result, Stage};
use crate::graph::ReasoningGraph;
use crate::laplacian::laplacian;
use crate::rules::{apply_rule, compose_rules, total_response, OperatorPath, SpectralRule};
use crate::spectral::{
    chebyshev_filter, exact_filter, gft, uniform_grid, ChebyshevFilter, FrequencyResponse, GraphSignal,
    SpectralContext,
};
use crate::symbolic::{
    bind_predicates, detect_conflicts, forward_chain, AtomId, Closure, KnowledgeBase, PredicateSet,
};
use crate::trainer::TrainableParams;

/// Points in the exported frequency-response table.
pub const RESPONSE_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponseSample {
    pub lambda: f64,
    /// Learned filter `h(lambda)`.
    pub filter: f64,
    /// Combined rule response `phi_total(lambda)`; 1 without rules.
    pub rules: f64,
    pub combined: f64,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    /// `b' = Phi_total x0`.
    pub rule_output: GraphSignal,
    /// Spectrum of `b'`; only the exact path materialises it.
    pub spectrum: Option<GraphSignal>,
    /// `y = h(L) b'`.
    pub filtered: GraphSignal,
    pub predicates: PredicateSet,
    pub closure: Closure,
    pub conflicts: Vec<(AtomId, AtomId)>,
    pub response: Vec<ResponseSample>,
}

impl PipelineOutput {
    /// Answer atoms: the closure of the KB plus bound predicates.
    pub fn answers(&self) -> &BTreeSet<AtomId> {
        &self.closure.atoms
    }
}

/// Node `i` stands for the KB atom named like its label, if any.
pub fn node_atom_mapping(graph: &ReasoningGraph, kb: &KnowledgeBase) -> Vec<Option<AtomId>> {
    graph.nodes().iter().map(|n| kb.atom(&n.label)).collect()
}

/// Configured pipeline with its (learned or initial) parameters.
#[derive(Debug, Clone)]
pub struct Pipeline {
    config: PipelineConfig,
    rules: Vec<SpectralRule>,
    params: TrainableParams,
}

impl Pipeline {
    pub fn new(config: PipelineConfig, rules: Vec<SpectralRule>) -> Result<Self> {
        let params = TrainableParams::init(&config, &rules)?;
        Self::with_params(config, rules, params)
    }

    pub fn with_params(config: PipelineConfig, rules: Vec<SpectralRule>, params: TrainableParams) -> Result<Self> {
        config.validate()?;
        params.validate()?;
        if params.band_count() != config.bands {
            return Err(Error::DimensionMismatch {
                expected: config.bands,
                found: params.band_count(),
            });
        }
        if params.order() != config.order {
            return Err(Error::DimensionMismatch {
                expected: config.order,
                found: params.order(),
            });
        }
        check_len(rules.len(), params.rule_weights.len())?;
        if rules.len() > 1 && rules.iter().any(|r| r.scope.is_some()) {
            return Err(Error::MixedScopes);
        }
        Ok(Self { config, rules, params })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn rules(&self) -> &[SpectralRule] {
        &self.rules
    }

    pub fn params(&self) -> &TrainableParams {
        &self.params
    }

    pub fn set_params(&mut self, params: TrainableParams) -> Result<()> {
        *self = Self::with_params(self.config.clone(), std::mem::take(&mut self.rules), params)?;
        Ok(())
    }

    pub fn context(&self, graph: &ReasoningGraph) -> Result<SpectralContext> {
        let l = laplacian(graph, self.config.laplacian);
        SpectralContext::new(l, self.config.crossover, self.config.rule_order)
    }

    pub fn rule_path(ctx: &SpectralContext) -> OperatorPath {
        if ctx.basis().is_some() {
            OperatorPath::Dense
        } else {
            OperatorPath::Chebyshev
        }
    }

    /// `b' = Phi_total x0`; the identity when there are no rules.
    pub fn apply_rules(&self, ctx: &SpectralContext, x0: &GraphSignal) -> Result<GraphSignal> {
        check_len(ctx.dim(), x0.len())?;
        if self.rules.is_empty() {
            return Ok(x0.clone());
        }
        let rules = self.params.weighted_rules(&self.rules)?;
        let op = compose_rules(&rules, ctx, Self::rule_path(ctx))?;
        apply_rule(&op, x0)
    }

    pub fn filter_for(&self, ctx: &SpectralContext) -> Result<ChebyshevFilter> {
        self.params.filter(ctx.lambda_max())
    }

    /// `y = h(L) b'` on the configured path, plus the spectrum of `b'` when
    /// the exact path computed it.
    pub fn apply_filter(
        &self,
        ctx: &SpectralContext,
        b: &GraphSignal,
    ) -> Result<(GraphSignal, Option<GraphSignal>)> {
        let filter = self.filter_for(ctx)?;
        match self.config.filter_path {
            FilterPath::Chebyshev => Ok((chebyshev_filter(ctx.laplacian(), &filter, b)?, None)),
            FilterPath::Exact => {
                let basis = ctx.basis().ok_or(Error::NoBasisAvailable {
                    n: ctx.dim(),
                    limit: ctx.crossover(),
                })?;
                let y = exact_filter(basis, &FrequencyResponse::Chebyshev(filter), b)?;
                Ok((y, Some(gft(basis, b)?)))
            }
        }
    }

    /// Stages 1 and 2 plus the projection, without the symbolic engine.
    pub fn predict(&self, graph: &ReasoningGraph, x0: &GraphSignal) -> Result<(GraphSignal, PredicateSet)> {
        let ctx = self.context(graph).map_err(|e| e.in_stage(Stage::Graph))?;
        let b = self.apply_rules(&ctx, x0).map_err(|e| e.in_stage(Stage::Rules))?;
        let (y, _) = self.apply_filter(&ctx, &b).map_err(|e| e.in_stage(Stage::Filter))?;
        let p = self
            .params
            .threshold(self.config.threshold)
            .apply(y.values())
            .map_err(|e| e.in_stage(Stage::Threshold))?;
        Ok((y, p))
    }

    /// Full run with nodes mapped to atoms by label.
    pub fn run(&self, graph: &ReasoningGraph, x0: &GraphSignal, kb: &KnowledgeBase) -> Result<PipelineOutput> {
        self.run_with_mapping(graph, x0, kb, &node_atom_mapping(graph, kb))
    }

    pub fn run_with_mapping(
        &self,
        graph: &ReasoningGraph,
        x0: &GraphSignal,
        kb: &KnowledgeBase,
        mapping: &[Option<AtomId>],
    ) -> Result<PipelineOutput> {
        let ctx = self.context(graph).map_err(|e| e.in_stage(Stage::Graph))?;
        let rule_output = self.apply_rules(&ctx, x0).map_err(|e| e.in_stage(Stage::Rules))?;
        let (filtered, spectrum) = self
            .apply_filter(&ctx, &rule_output)
            .map_err(|e| e.in_stage(Stage::Filter))?;
        let predicates = self
            .params
            .threshold(self.config.threshold)
            .apply(filtered.values())
            .map_err(|e| e.in_stage(Stage::Threshold))?;
        let bound = bind_predicates(&predicates, kb, mapping).map_err(|e| e.in_stage(Stage::Symbolic))?;
        let closure = forward_chain(&bound);
        let conflicts = detect_conflicts(&bound, &closure.atoms);
        let response = self.response_samples(ctx.lambda_max(), RESPONSE_SAMPLES).map_err(|e| e.in_stage(Stage::Filter))?;
        Ok(PipelineOutput {
            rule_output,
            spectrum,
            filtered,
            predicates,
            closure,
            conflicts,
            response,
        })
    }

    /// Learned filter, rule response and their product on a uniform grid.
    pub fn response_samples(&self, lambda_max: f64, samples: usize) -> Result<Vec<ResponseSample>> {
        let filter = self.params.filter(lambda_max)?;
        let rules = if self.rules.is_empty() {
            None
        } else {
            Some(total_response(&self.params.weighted_rules(&self.rules)?, lambda_max)?)
        };
        uniform_grid(lambda_max, samples)
            .into_iter()
            .map(|lambda| {
                let h = filter.response(lambda);
                let phi = rules.as_ref().map_or(1.0, |r| r.eval(lambda));
                if !(h.is_finite() && phi.is_finite()) {
                    return Err(Error::NonFiniteResponse { lambda });
                }
                Ok(ResponseSample {
                    lambda,
                    filter: h,
                    rules: phi,
                    combined: h * phi,
                })
            })
            .collect()
    }
}

/// One-shot run with freshly initialised parameters.
pub fn run_pipeline(
    cfg: &PipelineConfig,
    graph: &ReasoningGraph,
    x0: &GraphSignal,
    rules: &[SpectralRule],
    kb: &KnowledgeBase,
) -> Result<PipelineOutput> {
    Pipeline::new(cfg.clone(), rules.to_vec())?.run(graph, x0, kb)
}
