//! Combinatorial and symmetric normalized graph Laplacians.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ReasoningGraph;
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LaplacianKind {
    Combinatorial,
    Normalized,
}

impl fmt::Display for LaplacianKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LaplacianKind::Combinatorial => "combinatorial",
            LaplacianKind::Normalized => "normalized",
        })
    }
}

impl FromStr for LaplacianKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "combinatorial" => Ok(LaplacianKind::Combinatorial),
            "normalized" => Ok(LaplacianKind::Normalized),
            other => Err(Error::BadParams(format!("unknown laplacian kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Laplacian {
    kind: LaplacianKind,
    matrix: CsrMatrix,
    degrees: Vec<f64>,
    edge_count: usize,
}

/// `L = D - A`.
pub fn combinatorial_laplacian(g: &ReasoningGraph) -> Laplacian {
    let n = g.node_count();
    let mut triplets = Vec::with_capacity(g.adjacency().nnz() + n);
    for i in 0..n {
        triplets.push((i, i, g.degrees()[i]));
        triplets.extend(g.adjacency().row(i).map(|(j, w)| (i, j, -w)));
    }
    Laplacian {
        kind: LaplacianKind::Combinatorial,
        matrix: CsrMatrix::from_triplets(n, &triplets),
        degrees: g.degrees().to_vec(),
        edge_count: g.edge_count(),
    }
}

/// `I - D^{-1/2} A D^{-1/2}`. An isolated node keeps a unit diagonal and
/// zero off-diagonals, which keeps the spectrum inside `[0, 2]`.
pub fn normalized_laplacian(g: &ReasoningGraph) -> Laplacian {
    let n = g.node_count();
    let inv_sqrt: Vec<f64> = g
        .degrees()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
        .collect();
    let mut triplets = Vec::with_capacity(g.adjacency().nnz() + n);
    for i in 0..n {
        triplets.push((i, i, 1.0));
        triplets.extend(
            g.adjacency()
                .row(i)
                .map(|(j, w)| (i, j, -w * inv_sqrt[i] * inv_sqrt[j])),
        );
    }
    Laplacian {
        kind: LaplacianKind::Normalized,
        matrix: CsrMatrix::from_triplets(n, &triplets),
        degrees: g.degrees().to_vec(),
        edge_count: g.edge_count(),
    }
}

pub fn laplacian(g: &ReasoningGraph, kind: LaplacianKind) -> Laplacian {
    match kind {
        LaplacianKind::Combinatorial => combinatorial_laplacian(g),
        LaplacianKind::Normalized => normalized_laplacian(g),
    }
}

impl Laplacian {
    pub fn kind(&self) -> LaplacianKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// Undirected edge count of the underlying graph.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.matrix.mul_vec(x)
    }

    pub fn quadratic_form(&self, x: &[f64]) -> Result<f64> {
        let lx = self.apply(x)?;
        Ok(lx.iter().zip(x).map(|(a, b)| a * b).sum())
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        self.matrix.to_dense()
    }

    /// Rebuild from a raw symmetric matrix (used for perturbation studies).
    pub fn from_matrix(kind: LaplacianKind, matrix: CsrMatrix) -> Self {
        let n = matrix.dim();
        let degrees = (0..n)
            .map(|i| -matrix.row(i).filter(|&(j, _)| j != i).map(|(_, v)| v).sum::<f64>())
            .collect();
        let edge_count = (0..n)
            .map(|i| matrix.row(i).filter(|&(j, _)| j > i).count())
            .sum();
        Self {
            kind,
            matrix,
            degrees,
            edge_count,
        }
    }
}
