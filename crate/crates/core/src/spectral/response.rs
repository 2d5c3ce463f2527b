use std::fmt;
use std::sync::Arc;

use super::basis::SpectralBasis;
use super::chebyshev::ChebyshevFilter;
use super::signal::{Domain, GraphSignal};
use crate::error::{check_len, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResponseKind {
    LowPass,
    HighPass,
    BandPass,
    HeatKernel,
    Custom,
}

/// A real function of graph frequency, `g(lambda)`.
#[derive(Clone)]
pub enum FrequencyResponse {
    Constant(f64),
    /// `1 / (1 + beta * lambda)`
    LowPass { beta: f64 },
    /// `scale * lambda / lambda_max`
    HighPass { lambda_max: f64, scale: f64 },
    /// `exp(-(lambda - center)^2 / (2 sigma^2))`
    BandPass { center: f64, sigma: f64 },
    /// `exp(-t * lambda)`
    Heat { t: f64 },
    /// Piecewise-linear interpolation of sampled points, clamped at the ends.
    Sampled { lambdas: Vec<f64>, values: Vec<f64> },
    Chebyshev(ChebyshevFilter),
    Sum(Vec<(f64, FrequencyResponse)>),
    Product(Box<FrequencyResponse>, Box<FrequencyResponse>),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for FrequencyResponse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "Constant({c})"),
            Self::LowPass { beta } => write!(f, "LowPass {{ beta: {beta} }}"),
            Self::HighPass { lambda_max, scale } => {
                write!(f, "HighPass {{ lambda_max: {lambda_max}, scale: {scale} }}")
            }
            Self::BandPass { center, sigma } => {
                write!(f, "BandPass {{ center: {center}, sigma: {sigma} }}")
            }
            Self::Heat { t } => write!(f, "Heat {{ t: {t} }}"),
            Self::Sampled { lambdas, .. } => write!(f, "Sampled({} points)", lambdas.len()),
            Self::Chebyshev(c) => write!(f, "Chebyshev({c:?})"),
            Self::Sum(terms) => f.debug_list().entries(terms).finish(),
            Self::Product(a, b) => write!(f, "Product({a:?}, {b:?})"),
            Self::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl FrequencyResponse {
    pub fn custom(g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Custom(Arc::new(g))
    }

    pub fn sampled(lambdas: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_len(lambdas.len(), values.len())?;
        if lambdas.is_empty() {
            return Err(Error::BadParams("sampled response needs at least one point".into()));
        }
        if lambdas.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::BadParams("sampled lambdas must be strictly increasing".into()));
        }
        Ok(Self::Sampled { lambdas, values })
    }

    pub fn kind(&self) -> ResponseKind {
        match self {
            Self::LowPass { .. } => ResponseKind::LowPass,
            Self::HighPass { .. } => ResponseKind::HighPass,
            Self::BandPass { .. } => ResponseKind::BandPass,
            Self::Heat { .. } => ResponseKind::HeatKernel,
            _ => ResponseKind::Custom,
        }
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::LowPass { beta } => 1.0 / (1.0 + beta * lambda),
            Self::HighPass { lambda_max, scale } => scale * lambda / lambda_max,
            Self::BandPass { center, sigma } => {
                let d = lambda - center;
                (-d * d / (2.0 * sigma * sigma)).exp()
            }
            Self::Heat { t } => (-t * lambda).exp(),
            Self::Sampled { lambdas, values } => interpolate(lambdas, values, lambda),
            Self::Chebyshev(c) => c.response(lambda),
            Self::Sum(terms) => terms.iter().map(|(w, g)| w * g.eval(lambda)).sum(),
            Self::Product(a, b) => a.eval(lambda) * b.eval(lambda),
            Self::Custom(g) => g(lambda),
        }
    }

    /// Evaluate on each value, failing on the first non-finite output.
    pub fn eval_all(&self, lambdas: &[f64]) -> Result<Vec<f64>> {
        lambdas
            .iter()
            .map(|&lambda| {
                let v = self.eval(lambda);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::NonFiniteResponse { lambda })
                }
            })
            .collect()
    }
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[xs.len() - 1] {
        return ys[ys.len() - 1];
    }
    let hi = xs.partition_point(|&v| v <= x);
    let lo = hi - 1;
    let t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    ys[lo] + t * (ys[hi] - ys[lo])
}

/// `y = U g(Lambda) U^T x`.
pub fn exact_filter(basis: &SpectralBasis, g: &FrequencyResponse, x: &GraphSignal) -> Result<GraphSignal> {
    x.expect_domain(Domain::Vertex)?;
    check_len(basis.dim(), x.len())?;
    let response = g.eval_all(basis.eigenvalues())?;
    Ok(GraphSignal::from_raw(
        basis.apply_diagonal(&response, x.values()),
        Domain::Vertex,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_templates() {
        assert_eq!(FrequencyResponse::LowPass { beta: 1.0 }.eval(1.0), 0.5);
        assert!((FrequencyResponse::Heat { t: 0.5 }.eval(2.0) - (-1f64).exp()).abs() < 1e-15);
        let hp = FrequencyResponse::HighPass { lambda_max: 4.0, scale: 1.0 };
        assert_eq!(hp.eval(0.0), 0.0);
        assert_eq!(hp.eval(4.0), 1.0);
    }

    #[test]
    fn sampled_interpolates() {
        let g = FrequencyResponse::sampled(vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 2.0]).unwrap();
        assert_eq!(g.eval(0.5), 0.5);
        assert_eq!(g.eval(1.5), 1.0);
        assert_eq!(g.eval(-1.0), 1.0);
        assert_eq!(g.eval(3.0), 2.0);
        assert!(FrequencyResponse::sampled(vec![1.0, 0.0], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn non_finite_detected() {
        let g = FrequencyResponse::custom(|l| 1.0 / l);
        assert!(matches!(g.eval_all(&[0.0]), Err(Error::NonFiniteResponse { .. })));
    }
}
