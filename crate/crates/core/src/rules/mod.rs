//! Symbolic rules as spectral templates, their operators and composition.

mod dsl;
mod operator;
mod template;

pub use dsl::{format_rules, load_rules, parse_rules, read_samples};
pub use operator::{
    apply_rule, compose_rules, rule_operator, total_response, OperatorPath, OperatorRepr, RuleOperator,
    SpectralRule,
};
pub use template::{builtin_template, TemplateKind, TemplateParams, TemplateSpec};
