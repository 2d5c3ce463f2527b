//! Dense eigendecomposition of a Laplacian and the graph Fourier transform.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::signal::{Domain, GraphSignal};
use crate::error::{check_len, Error, Result};
use crate::laplacian::Laplacian;

/// Largest graph handled by the dense eigensolver unless configured otherwise.
pub const DEFAULT_DENSE_LIMIT: usize = 512;

const SIGN_TOL: f64 = 1e-10;

/// Eigenpairs of a Laplacian: ascending eigenvalues, column `i` of the
/// eigenvector matrix paired with eigenvalue `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBasis {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
}

pub fn eigendecompose(l: &Laplacian, limit: usize) -> Result<SpectralBasis> {
    let n = l.dim();
    if n > limit {
        return Err(Error::TooLarge { n, limit });
    }
    SpectralBasis::from_symmetric(l.to_dense())
}

impl SpectralBasis {
    /// Decompose an arbitrary dense symmetric matrix.
    pub fn from_symmetric(m: DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        let max_iter = 1000 + 100 * n;
        let eig = SymmetricEigen::try_new(m, f64::EPSILON, max_iter)
            .ok_or(Error::ConvergenceFailure {
                iterations: max_iter,
            })?;

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

        let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut eigenvectors = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            let mut col = eig.eigenvectors.column(src).into_owned();
            // first non-negligible entry positive
            if let Some(first) = col.iter().find(|v| v.abs() > SIGN_TOL) {
                if *first < 0.0 {
                    col.neg_mut();
                }
            }
            eigenvectors.set_column(dst, &col);
        }
        Ok(Self {
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, i: usize) -> Vec<f64> {
        self.eigenvectors.column(i).iter().copied().collect()
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `U diag(values) U^T`.
    pub fn operator(&self, values: &[f64]) -> DMatrix<f64> {
        let scaled = &self.eigenvectors * DMatrix::from_diagonal(&DVector::from_column_slice(values));
        scaled * self.eigenvectors.transpose()
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.operator(&self.eigenvalues)
    }

    /// `U diag(values) U^T x` without forming the operator.
    pub(crate) fn apply_diagonal(&self, values: &[f64], x: &[f64]) -> Vec<f64> {
        let xv = DVector::from_column_slice(x);
        let mut coeffs = self.eigenvectors.tr_mul(&xv);
        for (c, g) in coeffs.iter_mut().zip(values) {
            *c *= g;
        }
        (&self.eigenvectors * coeffs).iter().copied().collect()
    }
}

/// Graph Fourier transform `x_hat = U^T x`.
pub fn gft(basis: &SpectralBasis, x: &GraphSignal) -> Result<GraphSignal> {
    x.expect_domain(Domain::Vertex)?;
    check_len(basis.dim(), x.len())?;
    let out = basis
        .eigenvectors
        .tr_mul(&DVector::from_column_slice(x.values()));
    Ok(GraphSignal::from_raw(out.iter().copied().collect(), Domain::Spectral))
}

/// Inverse graph Fourier transform `x = U x_hat`.
pub fn igft(basis: &SpectralBasis, x_hat: &GraphSignal) -> Result<GraphSignal> {
    x_hat.expect_domain(Domain::Spectral)?;
    check_len(basis.dim(), x_hat.len())?;
    let out = &basis.eigenvectors * DVector::from_column_slice(x_hat.values());
    Ok(GraphSignal::from_raw(out.iter().copied().collect(), Domain::Vertex))
}
