//! Reasoning graphs: weighted undirected graphs over entities, facts and
//! propositions, plus similarity-based construction from node embeddings.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Entity,
    Fact,
    Proposition,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeKind::Entity => "entity",
            NodeKind::Fact => "fact",
            NodeKind::Proposition => "proposition",
        })
    }
}

impl FromStr for NodeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entity" => Ok(NodeKind::Entity),
            "fact" => Ok(NodeKind::Fact),
            "proposition" => Ok(NodeKind::Proposition),
            other => Err(Error::BadParams(format!("unknown node kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeMeta {
    pub id: usize,
    pub kind: NodeKind,
    pub label: String,
}

impl NodeMeta {
    pub fn new(id: usize, kind: NodeKind, label: impl Into<String>) -> Self {
        Self {
            id,
            kind,
            label: label.into(),
        }
    }
}

/// Undirected weighted graph with a symmetric, loop-free, non-negative
/// adjacency matrix. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ReasoningGraph {
    nodes: Vec<NodeMeta>,
    adjacency: CsrMatrix,
    degrees: Vec<f64>,
}

/// Assemble a graph from node metadata and an undirected edge list.
///
/// Each `(i, j, w)` contributes `w` to both `A[i][j]` and `A[j][i]`;
/// repeated pairs (in either orientation) are summed.
pub fn build_graph(nodes: Vec<NodeMeta>, edges: &[(usize, usize, f64)]) -> Result<ReasoningGraph> {
    let nodes = normalize_nodes(nodes)?;
    let n = nodes.len();
    let mut triplets = Vec::with_capacity(edges.len() * 2);
    for &(i, j, w) in edges {
        for idx in [i, j] {
            if idx >= n {
                return Err(Error::IndexOutOfRange { index: idx, len: n });
            }
        }
        if i == j {
            return Err(Error::SelfLoop { node: i });
        }
        if !(w >= 0.0) || !w.is_finite() {
            return Err(Error::NegativeWeight { i, j, weight: w });
        }
        if w > 0.0 {
            triplets.push((i, j, w));
            triplets.push((j, i, w));
        }
    }
    Ok(ReasoningGraph::from_adjacency(
        nodes,
        CsrMatrix::from_triplets(n, &triplets),
    ))
}

fn normalize_nodes(mut nodes: Vec<NodeMeta>) -> Result<Vec<NodeMeta>> {
    let count = nodes.len();
    if count == 0 {
        return Err(Error::BadNodeIds {
            count,
            detail: "graph has no nodes".into(),
        });
    }
    nodes.sort_by_key(|m| m.id);
    for (expected, meta) in nodes.iter().enumerate() {
        if meta.id != expected {
            return Err(Error::BadNodeIds {
                count,
                detail: format!("missing or duplicate id near {}", meta.id),
            });
        }
    }
    Ok(nodes)
}

impl ReasoningGraph {
    fn from_adjacency(nodes: Vec<NodeMeta>, adjacency: CsrMatrix) -> Self {
        let degrees = (0..adjacency.dim()).map(|i| adjacency.row_sum(i)).collect();
        Self {
            nodes,
            adjacency,
            degrees,
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Number of undirected edges with non-zero weight.
    pub fn edge_count(&self) -> usize {
        self.adjacency.nnz() / 2
    }

    pub fn nodes(&self) -> &[NodeMeta] {
        &self.nodes
    }

    pub fn adjacency(&self) -> &CsrMatrix {
        &self.adjacency
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.adjacency.get(i, j)
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// Upper-triangle edge list `(i, j, w)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for i in 0..self.node_count() {
            out.extend(self.adjacency.row(i).filter(|&(j, _)| j > i).map(|(j, w)| (i, j, w)));
        }
        out
    }

    /// Connected components as a node → component-index labelling.
    pub fn components(&self) -> (usize, Vec<usize>) {
        let n = self.node_count();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = count;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for (u, _) in self.adjacency.row(v) {
                    if comp[u] == usize::MAX {
                        comp[u] = count;
                        stack.push(u);
                    }
                }
            }
            count += 1;
        }
        (count, comp)
    }
}

/// Row-major `N x d` matrix of node feature vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeEmbedding {
    width: usize,
    data: Vec<f64>,
}

impl NodeEmbedding {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let width = rows.first().map(Vec::len).unwrap_or(0);
        if rows.is_empty() || width == 0 {
            return Err(Error::BadParams("embedding must have at least one row and column".into()));
        }
        let mut data = Vec::with_capacity(rows.len() * width);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != width {
                return Err(Error::DimensionMismatch {
                    expected: width,
                    found: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    what: format!("embedding row {i}"),
                });
            }
            data.extend(row);
        }
        Ok(Self { width, data })
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.width
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.width..(i + 1) * self.width]
    }
}

/// Cosine-similarity graph: `A_ij = cos(v_i, v_j)` when it is at least
/// `threshold` (and positive), otherwise 0. Weights land in `[0, 1]`.
pub fn similarity_adjacency(emb: &NodeEmbedding, threshold: f64) -> Result<ReasoningGraph> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::BadParams(format!("threshold {threshold} not in [0, 1]")));
    }
    let n = emb.len();
    let norms: Vec<f64> = (0..n)
        .map(|i| emb.row(i).iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    if let Some(node) = norms.iter().position(|&nrm| nrm == 0.0) {
        return Err(Error::ZeroVector { node });
    }
    let mut triplets = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let dot: f64 = emb.row(i).iter().zip(emb.row(j)).map(|(a, b)| a * b).sum();
            let cos = (dot / (norms[i] * norms[j])).clamp(0.0, 1.0);
            if cos > 0.0 && cos >= threshold {
                triplets.push((i, j, cos));
                triplets.push((j, i, cos));
            }
        }
    }
    let nodes = (0..n)
        .map(|i| NodeMeta::new(i, NodeKind::Entity, format!("n{i}")))
        .collect();
    Ok(ReasoningGraph::from_adjacency(
        nodes,
        CsrMatrix::from_triplets(n, &triplets),
    ))
}

/// Convenience: `n` anonymous proposition nodes.
pub fn anonymous_nodes(n: usize) -> Vec<NodeMeta> {
    (0..n)
        .map(|i| NodeMeta::new(i, NodeKind::Proposition, format!("n{i}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_is_symmetric() {
        let g = build_graph(anonymous_nodes(2), &[(0, 1, 1.0)]).unwrap();
        assert_eq!(g.weight(0, 1), 1.0);
        assert_eq!(g.weight(1, 0), 1.0);
        assert_eq!(g.weight(0, 0), 0.0);
    }

    #[test]
    fn path_degrees() {
        let g = build_graph(anonymous_nodes(3), &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        assert_eq!(g.degrees(), &[1.0, 2.0, 1.0]);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn duplicate_edges_sum() {
        let edges = [(0, 1, 0.5), (1, 0, 0.5)];
        let g = build_graph(anonymous_nodes(2), &edges).unwrap();
        // naive dense accumulator
        let mut dense = [[0.0f64; 2]; 2];
        for &(i, j, w) in &edges {
            dense[i][j] += w;
            dense[j][i] += w;
        }
        assert_eq!(g.weight(0, 1), dense[0][1]);
        assert_eq!(g.weight(0, 1), 1.0);
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            build_graph(anonymous_nodes(2), &[(0, 2, 1.0)]),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        ));
        assert!(matches!(
            build_graph(anonymous_nodes(2), &[(0, 1, -1.0)]),
            Err(Error::NegativeWeight { .. })
        ));
        assert!(matches!(
            build_graph(anonymous_nodes(2), &[(1, 1, 1.0)]),
            Err(Error::SelfLoop { node: 1 })
        ));
        let dup = vec![
            NodeMeta::new(0, NodeKind::Fact, "a"),
            NodeMeta::new(0, NodeKind::Fact, "b"),
        ];
        assert!(matches!(build_graph(dup, &[]), Err(Error::BadNodeIds { .. })));
    }

    #[test]
    fn nodes_are_reordered_by_id() {
        let nodes = vec![
            NodeMeta::new(1, NodeKind::Fact, "b"),
            NodeMeta::new(0, NodeKind::Entity, "a"),
        ];
        let g = build_graph(nodes, &[]).unwrap();
        assert_eq!(g.nodes()[0].label, "a");
    }

    #[test]
    fn similarity_basic_cases() {
        let emb = NodeEmbedding::from_rows(vec![
            vec![1.0, 0.0],
            vec![2.0, 0.0],
            vec![0.0, 3.0],
            vec![-1.0, 0.0],
        ])
        .unwrap();
        let g = similarity_adjacency(&emb, 0.5).unwrap();
        assert!((g.weight(0, 1) - 1.0).abs() < 1e-15);
        assert_eq!(g.weight(0, 2), 0.0);
        assert_eq!(g.weight(0, 3), 0.0);
        assert!(g.adjacency().is_symmetric(0.0));
    }

    #[test]
    fn similarity_rejects_zero_rows() {
        let emb = NodeEmbedding::from_rows(vec![vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(similarity_adjacency(&emb, 0.1), Err(Error::ZeroVector { node: 1 })));
        assert!(similarity_adjacency(&emb, 1.5).is_err());
    }

    #[test]
    fn components_count() {
        let g = build_graph(anonymous_nodes(5), &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(g.components().0, 3);
    }
}
