use std::fmt;

/// Pipeline stage a propagated error originated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Graph,
    Rules,
    Filter,
    Threshold,
    Symbolic,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Graph => "graph",
            Stage::Rules => "rules",
            Stage::Filter => "filter",
            Stage::Threshold => "threshold",
            Stage::Symbolic => "symbolic",
        };
        f.write_str(name)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("index {index} out of range for {len} nodes")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("negative or non-finite weight {weight} on edge ({i}, {j})")]
    NegativeWeight { i: usize, j: usize, weight: f64 },
    #[error("self-loop on node {node}")]
    SelfLoop { node: usize },
    #[error("node ids must be unique and dense in [0, {count}): {detail}")]
    BadNodeIds { count: usize, detail: String },
    #[error("embedding row {node} has zero norm")]
    ZeroVector { node: usize },
    #[error("non-finite value in {what}")]
    NonFinite { what: String },
    #[error("eigensolver failed to converge after {iterations} iterations")]
    ConvergenceFailure { iterations: usize },
    #[error("graph with {n} nodes exceeds the dense limit {limit}; use the Chebyshev path")]
    TooLarge { n: usize, limit: usize },
    #[error("signal is in the {found} domain, expected {expected}")]
    DomainMismatch {
        expected: &'static str,
        found: &'static str,
    },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("frequency response is not finite at lambda = {lambda}")]
    NonFiniteResponse { lambda: f64 },
    #[error("lambda = {lambda} lies outside [0, {lambda_max}]")]
    OutOfRange { lambda: f64, lambda_max: f64 },
    #[error("band filters have different orders")]
    MixedOrders,
    #[error("band filters have different lambda_max values")]
    MixedLambdaMax,
    #[error("no eigenbasis available for {n} nodes (dense limit {limit})")]
    NoBasisAvailable { n: usize, limit: usize },
    #[error("rule set is empty")]
    EmptyRuleSet,
    #[error("cannot compose rules with node scopes")]
    MixedScopes,
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("node {0} is true but has no atom mapping")]
    UnmappedNode(usize),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("no labeled nodes")]
    EmptyLabels,
    #[error("non-finite gradient for parameter `{param}`")]
    NonFiniteGradient { param: String },
    #[error("loss diverged (NaN) at epoch {epoch}")]
    DivergedLoss { epoch: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{stage} stage: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub fn in_stage(self, stage: Stage) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }

    /// Numerical failures (as opposed to bad input) map to CLI exit code 2.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::ConvergenceFailure { .. }
            | Error::NonFiniteResponse { .. }
            | Error::NonFiniteGradient { .. }
            | Error::DivergedLoss { .. }
            | Error::NonFinite { .. } => true,
            Error::Stage { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::NegativeWeight { .. } => "NegativeWeight",
            Error::SelfLoop { .. } => "SelfLoop",
            Error::BadNodeIds { .. } => "BadNodeIds",
            Error::ZeroVector { .. } => "ZeroVector",
            Error::NonFinite { .. } => "NonFinite",
            Error::ConvergenceFailure { .. } => "ConvergenceFailure",
            Error::TooLarge { .. } => "TooLarge",
            Error::DomainMismatch { .. } => "DomainMismatch",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NonFiniteResponse { .. } => "NonFiniteResponse",
            Error::OutOfRange { .. } => "OutOfRange",
            Error::MixedOrders => "MixedOrders",
            Error::MixedLambdaMax => "MixedLambdaMax",
            Error::NoBasisAvailable { .. } => "NoBasisAvailable",
            Error::EmptyRuleSet => "EmptyRuleSet",
            Error::MixedScopes => "MixedScopes",
            Error::BadParams(_) => "BadParams",
            Error::UnmappedNode(_) => "UnmappedNode",
            Error::UnknownAtom(_) => "UnknownAtom",
            Error::EmptyLabels => "EmptyLabels",
            Error::NonFiniteGradient { .. } => "NonFiniteGradient",
            Error::DivergedLoss { .. } => "DivergedLoss",
            Error::EmptyDataset => "EmptyDataset",
            Error::Parse { .. } => "Parse",
            Error::Stage { source, .. } => source.kind(),
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

pub(crate) fn check_finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite {
            what: what.to_string(),
        })
    }
}
