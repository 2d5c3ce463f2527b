use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::template::{TemplateKind, TemplateSpec};
use crate::error::{check_len, Error, Result};
use crate::laplacian::Laplacian;
use crate::spectral::{
    chebyshev_filter, fit_chebyshev, ChebyshevFilter, FrequencyResponse, GraphSignal, SpectralContext,
};

/// A symbolic rule grounded as a frequency response over the graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralRule {
    pub id: String,
    pub template: TemplateSpec,
    pub weight: f64,
    /// Nodes the rule acts on; `None` means the whole graph.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scope: Option<Vec<usize>>,
}

impl SpectralRule {
    pub fn new(id: impl Into<String>, template: TemplateSpec, weight: f64) -> Result<Self> {
        if !(weight >= 0.0) || !weight.is_finite() {
            return Err(Error::BadParams(format!("rule weight must be >= 0, got {weight}")));
        }
        Ok(Self {
            id: id.into(),
            template,
            weight,
            scope: None,
        })
    }

    pub fn with_scope(mut self, scope: Vec<usize>) -> Self {
        self.scope = Some(scope);
        self
    }

    pub fn kind(&self) -> TemplateKind {
        self.template.kind
    }

    pub fn response(&self, lambda_max: f64) -> Result<FrequencyResponse> {
        self.template.instantiate(lambda_max)
    }

    fn mask(&self, n: usize) -> Result<Option<Vec<bool>>> {
        let Some(scope) = &self.scope else {
            return Ok(None);
        };
        let mut mask = vec![false; n];
        for &i in scope {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, len: n });
            }
            mask[i] = true;
        }
        Ok(Some(mask))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorPath {
    Dense,
    Chebyshev,
}

#[derive(Debug, Clone)]
pub enum OperatorRepr {
    Dense(DMatrix<f64>),
    Chebyshev {
        filter: ChebyshevFilter,
        laplacian: Arc<Laplacian>,
    },
}

/// A rule (or weighted rule combination) ready to apply to belief vectors.
///
/// Scoped operators zero the signal outside the scope before filtering and
/// pass the original values through there afterwards.
#[derive(Debug, Clone)]
pub struct RuleOperator {
    repr: OperatorRepr,
    mask: Option<Vec<bool>>,
    provenance: Vec<(String, f64)>,
}

impl RuleOperator {
    pub fn repr(&self) -> &OperatorRepr {
        &self.repr
    }

    pub fn dense_matrix(&self) -> Option<&DMatrix<f64>> {
        match &self.repr {
            OperatorRepr::Dense(m) => Some(m),
            OperatorRepr::Chebyshev { .. } => None,
        }
    }

    pub fn chebyshev(&self) -> Option<&ChebyshevFilter> {
        match &self.repr {
            OperatorRepr::Chebyshev { filter, .. } => Some(filter),
            OperatorRepr::Dense(_) => None,
        }
    }

    /// `(rule_id, applied weight)` pairs this operator was built from.
    pub fn provenance(&self) -> &[(String, f64)] {
        &self.provenance
    }

    pub fn dim(&self) -> usize {
        match &self.repr {
            OperatorRepr::Dense(m) => m.nrows(),
            OperatorRepr::Chebyshev { laplacian, .. } => laplacian.dim(),
        }
    }
}

fn build_repr(ctx: &SpectralContext, response: &FrequencyResponse, path: OperatorPath) -> Result<OperatorRepr> {
    match path {
        OperatorPath::Dense => {
            let basis = ctx.basis().ok_or(Error::NoBasisAvailable {
                n: ctx.dim(),
                limit: ctx.crossover(),
            })?;
            let values = response.eval_all(basis.eigenvalues())?;
            Ok(OperatorRepr::Dense(basis.operator(&values)))
        }
        OperatorPath::Chebyshev => Ok(OperatorRepr::Chebyshev {
            filter: fit_chebyshev(response, ctx.chebyshev_order(), ctx.lambda_max())?,
            laplacian: ctx.laplacian_arc(),
        }),
    }
}

/// `Phi_r = U phi_r(Lambda) U^T` (dense) or a Chebyshev fit of `phi_r`.
/// The rule weight is not applied here.
pub fn rule_operator(ctx: &SpectralContext, rule: &SpectralRule, path: OperatorPath) -> Result<RuleOperator> {
    let response = rule.response(ctx.lambda_max())?;
    Ok(RuleOperator {
        repr: build_repr(ctx, &response, path)?,
        mask: rule.mask(ctx.dim())?,
        provenance: vec![(rule.id.clone(), 1.0)],
    })
}

/// `b' = Phi b`.
pub fn apply_rule(op: &RuleOperator, b: &GraphSignal) -> Result<GraphSignal> {
    check_len(op.dim(), b.len())?;
    let input = match &op.mask {
        Some(mask) => {
            let masked = b
                .values()
                .iter()
                .zip(mask)
                .map(|(&v, &keep)| if keep { v } else { 0.0 })
                .collect();
            GraphSignal::new(masked, b.domain())?
        }
        None => b.clone(),
    };
    let mut out = match &op.repr {
        OperatorRepr::Dense(m) => {
            let y = m * DVector::from_column_slice(input.values());
            GraphSignal::new(y.iter().copied().collect(), b.domain())?
        }
        OperatorRepr::Chebyshev { filter, laplacian } => chebyshev_filter(laplacian, filter, &input)?,
    };
    if let Some(mask) = &op.mask {
        let passthrough: Vec<f64> = out
            .values()
            .iter()
            .zip(b.values())
            .zip(mask)
            .map(|((&y, &orig), &keep)| if keep { y } else { orig })
            .collect();
        out = GraphSignal::new(passthrough, b.domain())?;
    }
    Ok(out)
}

/// `Phi_total = sum_r w_r Phi_r`, realised as the single response
/// `phi_total(lambda) = sum_r w_r phi_r(lambda)`.
///
/// Scoped rules can only be composed on their own; pass-through outside a
/// scope does not distribute over the weighted sum.
pub fn compose_rules(rules: &[SpectralRule], ctx: &SpectralContext, path: OperatorPath) -> Result<RuleOperator> {
    if rules.is_empty() {
        return Err(Error::EmptyRuleSet);
    }
    if rules.len() > 1 && rules.iter().any(|r| r.scope.is_some()) {
        return Err(Error::MixedScopes);
    }
    let terms = rules
        .iter()
        .map(|r| Ok((r.weight, r.response(ctx.lambda_max())?)))
        .collect::<Result<Vec<_>>>()?;
    let total = FrequencyResponse::Sum(terms);
    Ok(RuleOperator {
        repr: build_repr(ctx, &total, path)?,
        mask: rules[0].mask(ctx.dim())?,
        provenance: rules.iter().map(|r| (r.id.clone(), r.weight)).collect(),
    })
}

/// Combined response of a rule set, without building an operator.
pub fn total_response(rules: &[SpectralRule], lambda_max: f64) -> Result<FrequencyResponse> {
    let terms = rules
        .iter()
        .map(|r| Ok((r.weight, r.response(lambda_max)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(FrequencyResponse::Sum(terms))
}
