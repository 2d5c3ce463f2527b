use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::FrequencyResponse;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TemplateKind {
    LowPass,
    HighPass,
    BandPass,
    Heat,
    Custom,
}

impl fmt::Display for TemplateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TemplateKind::LowPass => "low-pass",
            TemplateKind::HighPass => "high-pass",
            TemplateKind::BandPass => "band-pass",
            TemplateKind::Heat => "heat",
            TemplateKind::Custom => "custom",
        })
    }
}

impl FromStr for TemplateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "low-pass" => Ok(TemplateKind::LowPass),
            "high-pass" => Ok(TemplateKind::HighPass),
            "band-pass" => Ok(TemplateKind::BandPass),
            "heat" | "heat-kernel" => Ok(TemplateKind::Heat),
            "custom" => Ok(TemplateKind::Custom),
            other => Err(Error::BadParams(format!("unknown template kind `{other}`"))),
        }
    }
}

/// Shape parameters; unset values take the per-kind defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TemplateParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

/// Serializable description of a rule template.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemplateSpec {
    pub kind: TemplateKind,
    #[serde(default)]
    pub params: TemplateParams,
    /// `(lambda, value)` points for custom templates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<(f64, f64)>>,
    /// Where custom samples were loaded from, kept for round-tripping rule files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl TemplateSpec {
    pub fn builtin(kind: TemplateKind, params: TemplateParams) -> Self {
        Self {
            kind,
            params,
            samples: None,
            source: None,
        }
    }

    pub fn custom(samples: Vec<(f64, f64)>) -> Self {
        Self {
            kind: TemplateKind::Custom,
            params: TemplateParams::default(),
            samples: Some(samples),
            source: None,
        }
    }

    pub fn instantiate(&self, lambda_max: f64) -> Result<FrequencyResponse> {
        match self.kind {
            TemplateKind::Custom => {
                let samples = self
                    .samples
                    .as_ref()
                    .ok_or_else(|| Error::BadParams("custom template without samples".into()))?;
                let (lambdas, values) = samples.iter().copied().unzip();
                FrequencyResponse::sampled(lambdas, values)
            }
            kind => builtin_template(kind, &self.params, lambda_max),
        }
    }
}

fn positive(name: &str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::BadParams(format!("{name} must be positive, got {value}")))
    }
}

/// Parametric template families:
/// low-pass `1/(1+beta lambda)`, high-pass `scale lambda/lambda_max`,
/// band-pass `exp(-(lambda-c)^2 / 2 sigma^2)`, heat `exp(-t lambda)`.
pub fn builtin_template(kind: TemplateKind, params: &TemplateParams, lambda_max: f64) -> Result<FrequencyResponse> {
    let lambda_max = positive("lambda_max", lambda_max)?;
    match kind {
        TemplateKind::LowPass => Ok(FrequencyResponse::LowPass {
            beta: positive("beta", params.beta.unwrap_or(1.0))?,
        }),
        TemplateKind::HighPass => Ok(FrequencyResponse::HighPass {
            lambda_max,
            scale: positive("scale", params.scale.unwrap_or(1.0))?,
        }),
        TemplateKind::BandPass => Ok(FrequencyResponse::BandPass {
            center: params.center.unwrap_or(lambda_max / 2.0),
            sigma: positive("sigma", params.sigma.unwrap_or(lambda_max / 10.0))?,
        }),
        TemplateKind::Heat => Ok(FrequencyResponse::Heat {
            t: positive("t", params.t.unwrap_or(1.0))?,
        }),
        TemplateKind::Custom => Err(Error::BadParams(
            "custom templates need sampled data, not parameters".into(),
        )),
    }
}
