use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Vertex,
    Spectral,
}

impl Domain {
    pub fn name(self) -> &'static str {
        match self {
            Domain::Vertex => "vertex",
            Domain::Spectral => "spectral",
        }
    }
}

/// A real vector over graph nodes (vertex domain) or graph frequencies
/// (spectral domain).
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSignal {
    values: Vec<f64>,
    domain: Domain,
}

impl GraphSignal {
    pub fn new(values: Vec<f64>, domain: Domain) -> Result<Self> {
        check_finite(&values, "graph signal")?;
        Ok(Self { values, domain })
    }

    pub fn vertex(values: Vec<f64>) -> Result<Self> {
        Self::new(values, Domain::Vertex)
    }

    pub fn spectral(values: Vec<f64>) -> Result<Self> {
        Self::new(values, Domain::Spectral)
    }

    pub fn zeros(n: usize, domain: Domain) -> Self {
        Self {
            values: vec![0.0; n],
            domain,
        }
    }

    pub(crate) fn from_raw(values: Vec<f64>, domain: Domain) -> Self {
        Self { values, domain }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub(crate) fn expect_domain(&self, expected: Domain) -> Result<()> {
        if self.domain == expected {
            Ok(())
        } else {
            Err(Error::DomainMismatch {
                expected: expected.name(),
                found: self.domain.name(),
            })
        }
    }
}
