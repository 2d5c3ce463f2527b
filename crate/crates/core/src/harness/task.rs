use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_graph, NodeKind, NodeMeta, ReasoningGraph};
use crate::spectral::GraphSignal;
use crate::symbolic::{forward_chain, AtomId, KnowledgeBase};
use crate::trainer::Labels;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Transitive,
    Kinship,
    Conflict,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Transitive => "transitive",
            Family::Kinship => "kinship",
            Family::Conflict => "conflict",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "transitive" => Ok(Family::Transitive),
            "kinship" => Ok(Family::Kinship),
            "conflict" => Ok(Family::Conflict),
            other => Err(Error::BadParams(format!("unknown task family `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskMeta {
    pub family: Family,
    pub depth: usize,
    pub width: usize,
    pub seed: u64,
}

/// A generated reasoning problem. Node `i` stands for KB atom `i`; labels
/// cover every node that is not a fact and come from forward chaining.
#[derive(Debug, Clone)]
pub struct SyntheticTask {
    pub graph: ReasoningGraph,
    pub x0: GraphSignal,
    pub kb: KnowledgeBase,
    pub labels: Labels,
    pub meta: TaskMeta,
}

impl SyntheticTask {
    pub fn mapping(&self) -> Vec<Option<AtomId>> {
        crate::pipeline::node_atom_mapping(&self.graph, &self.kb)
    }

    pub fn positives(&self) -> usize {
        self.labels.values().filter(|&&l| l).count()
    }
}

/// Generator-side description before node ids are assigned.
#[derive(Debug, Default)]
pub(crate) struct Draft {
    pub names: Vec<String>,
    pub facts: Vec<usize>,
    pub clauses: Vec<(usize, Vec<usize>)>,
    pub exclusive: Vec<(usize, usize)>,
}

impl Draft {
    pub fn atom(&mut self, name: String) -> usize {
        self.names.push(name);
        self.names.len() - 1
    }

    /// Shuffle node ids and assemble the task around them.
    pub fn assemble(self, meta: TaskMeta, rng: &mut ChaCha8Rng) -> Result<SyntheticTask> {
        let n = self.names.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut pos = vec![0; n];
        for (node, &atom) in order.iter().enumerate() {
            pos[atom] = node;
        }
        let is_fact = {
            let mut v = vec![false; n];
            for &f in &self.facts {
                v[f] = true;
            }
            v
        };

        let mut kb = KnowledgeBase::new();
        for &atom in &order {
            kb.add_atom(&self.names[atom]);
        }
        for &f in &self.facts {
            kb.add_fact(pos[f])?;
        }
        let mut edges = Vec::new();
        for (head, body) in &self.clauses {
            let body: Vec<usize> = body.iter().map(|&b| pos[b]).collect();
            for &b in &body {
                edges.push((b, pos[*head], 1.0));
            }
            kb.add_clause(pos[*head], &body)?;
        }
        for &(a, b) in &self.exclusive {
            kb.add_exclusive(pos[a], pos[b])?;
            edges.push((pos[a], pos[b], 1.0));
        }

        let nodes = order
            .iter()
            .enumerate()
            .map(|(node, &atom)| {
                let kind = if is_fact[atom] { NodeKind::Fact } else { NodeKind::Proposition };
                NodeMeta::new(node, kind, self.names[atom].clone())
            })
            .collect();
        let graph = build_graph(nodes, &edges)?;
        let x0 = GraphSignal::vertex(order.iter().map(|&a| if is_fact[a] { 1.0 } else { 0.0 }).collect())?;
        let closure = forward_chain(&kb);
        let labels = (0..n)
            .filter(|&node| !is_fact[order[node]])
            .map(|node| (node, closure.atoms.contains(&node)))
            .collect();
        Ok(SyntheticTask {
            graph,
            x0,
            kb,
            labels,
            meta,
        })
    }
}
