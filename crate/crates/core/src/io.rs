//! File formats.
//!
//! Graph text:
//!
//! ```text
//! N 3
//! node 0 fact a
//! node 1 proposition b
//! node 2 entity c
//! edge 0 1 1
//! ```
//!
//! `node` lines are optional (missing nodes become anonymous entities);
//! labels are single tokens. Blank lines and `#` comments are ignored. The
//! JSON form is `{"nodes": [{"id", "kind", "label"}], "edges": [[i, j, w]]}`.
//!
//! Signals are one value per line; embeddings one comma-separated row per
//! node; labels are `node,0|1` lines; filters are JSON
//! `{"lambda_max": .., "coefficients": [..]}`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_graph, NodeEmbedding, NodeKind, NodeMeta, ReasoningGraph};
use crate::spectral::{ChebyshevFilter, GraphSignal};

/// `fs::read_to_string` with the path in the error message.
pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn tokens(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then(|| (i + 1, line.split_whitespace().collect()))
    })
}

fn field<T: std::str::FromStr>(line: usize, s: &str, what: &str) -> Result<T> {
    s.parse().map_err(|_| Error::parse(line, format!("bad {what} `{s}`")))
}

pub fn parse_graph_text(text: &str) -> Result<ReasoningGraph> {
    let mut count: Option<usize> = None;
    let mut nodes: BTreeMap<usize, NodeMeta> = BTreeMap::new();
    let mut edges = Vec::new();
    for (line, tok) in tokens(text) {
        match tok.as_slice() {
            ["N", n] => {
                if count.is_some() {
                    return Err(Error::parse(line, "duplicate `N` line"));
                }
                count = Some(field(line, n, "node count")?);
            }
            ["node", id, kind, label] => {
                let id: usize = field(line, id, "node id")?;
                let kind: NodeKind = field(line, kind, "node kind")?;
                if nodes.insert(id, NodeMeta::new(id, kind, *label)).is_some() {
                    return Err(Error::parse(line, format!("node {id} declared twice")));
                }
            }
            ["edge", i, j, w] => {
                edges.push((field(line, i, "node id")?, field(line, j, "node id")?, field(line, w, "weight")?));
            }
            _ => return Err(Error::parse(line, "expected `N`, `node` or `edge`")),
        }
    }
    let n = count.ok_or_else(|| Error::parse(1, "missing `N <count>` line"))?;
    let metas = (0..n)
        .map(|i| {
            nodes
                .remove(&i)
                .unwrap_or_else(|| NodeMeta::new(i, NodeKind::Entity, format!("n{i}")))
        })
        .collect();
    if let Some((&extra, _)) = nodes.iter().next() {
        return Err(Error::IndexOutOfRange { index: extra, len: n });
    }
    build_graph(metas, &edges)
}

pub fn format_graph_text(g: &ReasoningGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "N {}", g.node_count());
    for n in g.nodes() {
        let _ = writeln!(out, "node {} {} {}", n.id, n.kind, n.label);
    }
    for (i, j, w) in g.edges() {
        let _ = writeln!(out, "edge {i} {j} {w}");
    }
    out
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    nodes: Vec<NodeMeta>,
    edges: Vec<(usize, usize, f64)>,
}

pub fn parse_graph_json(text: &str) -> Result<ReasoningGraph> {
    let g: GraphJson = serde_json::from_str(text)?;
    build_graph(g.nodes, &g.edges)
}

pub fn format_graph_json(g: &ReasoningGraph) -> Result<String> {
    Ok(serde_json::to_string_pretty(&GraphJson {
        nodes: g.nodes().to_vec(),
        edges: g.edges(),
    })?)
}

/// Reads either format, choosing JSON for a `.json` extension.
pub fn read_graph(path: &Path) -> Result<ReasoningGraph> {
    let text = read_text(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        parse_graph_json(&text)
    } else {
        parse_graph_text(&text)
    }
}

pub fn parse_signal(text: &str) -> Result<GraphSignal> {
    let values = tokens(text)
        .map(|(line, tok)| match tok.as_slice() {
            [v] => field(line, v, "value"),
            _ => Err(Error::parse(line, "expected one value per line")),
        })
        .collect::<Result<Vec<f64>>>()?;
    GraphSignal::vertex(values)
}

pub fn format_signal(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v}\n")).collect()
}

pub fn parse_embedding(text: &str) -> Result<NodeEmbedding> {
    let rows = tokens(text)
        .map(|(line, tok)| {
            tok.join(" ")
                .split(',')
                .map(|v| field(line, v.trim(), "value"))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    NodeEmbedding::from_rows(rows)
}

pub fn parse_labels(text: &str) -> Result<BTreeMap<usize, bool>> {
    let mut labels = BTreeMap::new();
    for (line, tok) in tokens(text) {
        let joined = tok.join("");
        let (node, label) = joined
            .split_once(',')
            .ok_or_else(|| Error::parse(line, "expected `node,label`"))?;
        let node: usize = field(line, node, "node id")?;
        let label = match label {
            "0" => false,
            "1" => true,
            other => return Err(Error::parse(line, format!("label must be 0 or 1, got `{other}`"))),
        };
        if labels.insert(node, label).is_some() {
            return Err(Error::parse(line, format!("node {node} labeled twice")));
        }
    }
    Ok(labels)
}

pub fn format_labels(labels: &BTreeMap<usize, bool>) -> String {
    labels.iter().map(|(n, &l)| format!("{n},{}\n", u8::from(l))).collect()
}

#[derive(Serialize, Deserialize)]
struct FilterJson {
    lambda_max: f64,
    coefficients: Vec<f64>,
}

pub fn parse_filter_json(text: &str) -> Result<ChebyshevFilter> {
    let f: FilterJson = serde_json::from_str(text)?;
    ChebyshevFilter::new(f.coefficients, f.lambda_max)
}

pub fn format_filter_json(f: &ChebyshevFilter) -> Result<String> {
    Ok(serde_json::to_string_pretty(&FilterJson {
        lambda_max: f.lambda_max(),
        coefficients: f.coefficients().to_vec(),
    })?)
}
