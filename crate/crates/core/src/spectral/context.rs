use std::sync::Arc;

use super::basis::{eigendecompose, SpectralBasis};
use super::chebyshev::lambda_max_for;
use crate::error::Result;
use crate::laplacian::Laplacian;

/// Everything a spectral operator may need about one graph: the Laplacian,
/// the rescaling bound, and the eigenbasis when the graph is small enough
/// for the dense path.
#[derive(Debug, Clone)]
pub struct SpectralContext {
    laplacian: Arc<Laplacian>,
    lambda_max: f64,
    basis: Option<Arc<SpectralBasis>>,
    crossover: usize,
    chebyshev_order: usize,
}

impl SpectralContext {
    /// Eigendecomposes when `N <= crossover`.
    pub fn new(laplacian: Laplacian, crossover: usize, chebyshev_order: usize) -> Result<Self> {
        let lambda_max = lambda_max_for(&laplacian);
        let basis = if laplacian.dim() <= crossover {
            Some(Arc::new(eigendecompose(&laplacian, crossover)?))
        } else {
            None
        };
        Ok(Self {
            laplacian: Arc::new(laplacian),
            lambda_max,
            basis,
            crossover,
            chebyshev_order,
        })
    }

    /// Chebyshev-only context with a caller-supplied spectral bound.
    pub fn without_basis(laplacian: Laplacian, lambda_max: f64, chebyshev_order: usize) -> Self {
        Self {
            crossover: 0,
            laplacian: Arc::new(laplacian),
            lambda_max,
            basis: None,
            chebyshev_order,
        }
    }

    pub fn dim(&self) -> usize {
        self.laplacian.dim()
    }

    pub fn laplacian(&self) -> &Laplacian {
        &self.laplacian
    }

    pub(crate) fn laplacian_arc(&self) -> Arc<Laplacian> {
        Arc::clone(&self.laplacian)
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn basis(&self) -> Option<&SpectralBasis> {
        self.basis.as_deref()
    }

    pub fn crossover(&self) -> usize {
        self.crossover
    }

    /// Polynomial order used when a response must be approximated.
    pub fn chebyshev_order(&self) -> usize {
        self.chebyshev_order
    }
}
