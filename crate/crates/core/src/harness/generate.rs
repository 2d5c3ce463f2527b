//! Seeded task generators. Labels always come from forward chaining.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::task::{Draft, Family, SyntheticTask, TaskMeta};
use crate::error::{Error, Result};

pub const MAX_DEPTH: usize = 8;
pub const MAX_CHAIN: usize = 16;
pub const DEFAULT_DISTRACTOR_RATIO: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitiveParams {
    pub depth: usize,
    pub width: usize,
    /// Fraction of all nodes that belong to the unsupported distractor DAG.
    pub distractor_ratio: f64,
}

impl TransitiveParams {
    pub fn new(depth: usize, width: usize) -> Self {
        Self {
            depth,
            width,
            distractor_ratio: DEFAULT_DISTRACTOR_RATIO,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(1..=MAX_DEPTH).contains(&self.depth) {
            return Err(Error::BadParams(format!("depth must be in 1..={MAX_DEPTH}, got {}", self.depth)));
        }
        if self.width == 0 {
            return Err(Error::BadParams("width must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&self.distractor_ratio) {
            return Err(Error::BadParams(format!(
                "distractor ratio must be in [0, 1), got {}",
                self.distractor_ratio
            )));
        }
        Ok(())
    }

    fn distractor_count(&self) -> usize {
        let supported = ((self.depth + 1) * self.width) as f64;
        let r = self.distractor_ratio;
        (supported * r / (1.0 - r)).round() as usize
    }
}

/// Layered implication DAG: every node above level 0 gets one clause whose
/// body is one or two nodes of the level below.
fn layered(draft: &mut Draft, rng: &mut ChaCha8Rng, prefix: &str, count: usize, width: usize) -> Vec<Vec<usize>> {
    let mut levels: Vec<Vec<usize>> = Vec::new();
    let mut made = 0;
    while made < count {
        let level = levels.len();
        let size = width.min(count - made);
        let ids: Vec<usize> = (0..size).map(|j| draft.atom(format!("{prefix}{level}_{j}"))).collect();
        if let Some(prev) = levels.last() {
            for &head in &ids {
                let k = if prev.len() >= 2 { rng.random_range(1..=2) } else { 1 };
                let mut body: Vec<usize> = prev.choose_multiple(rng, k).copied().collect();
                body.sort_unstable();
                draft.clauses.push((head, body));
            }
        }
        made += size;
        levels.push(ids);
    }
    levels
}

fn transitive_draft(params: &TransitiveParams, rng: &mut ChaCha8Rng) -> (Draft, Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let mut draft = Draft::default();
    let supported = layered(&mut draft, rng, "a", (params.depth + 1) * params.width, params.width);
    draft.facts.extend(supported[0].iter().copied());
    let distractors = layered(&mut draft, rng, "d", params.distractor_count(), params.width);
    (draft, supported, distractors)
}

/// Multi-hop deduction with default distractor density.
pub fn gen_transitive(depth: usize, width: usize, seed: u64) -> Result<SyntheticTask> {
    gen_transitive_with(&TransitiveParams::new(depth, width), seed)
}

pub fn gen_transitive_with(params: &TransitiveParams, seed: u64) -> Result<SyntheticTask> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (draft, _, _) = transitive_draft(params, &mut rng);
    draft.assemble(
        TaskMeta {
            family: Family::Transitive,
            depth: params.depth,
            width: params.width,
            seed,
        },
        &mut rng,
    )
}

/// Transitive task plus `width` exclusive pairs `(a, not_a)`. Each `not_a`
/// follows from a random node; when that node is derivable the pair is a
/// real conflict.
pub fn gen_conflict(depth: usize, width: usize, seed: u64) -> Result<SyntheticTask> {
    let params = TransitiveParams::new(depth, width);
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut draft, supported, distractors) = transitive_draft(&params, &mut rng);
    let derived: Vec<usize> = supported[1..].iter().flatten().copied().collect();
    let supported_all: Vec<usize> = supported.iter().flatten().copied().collect();
    let distractor_all: Vec<usize> = distractors.iter().flatten().copied().collect();
    for target in derived.choose_multiple(&mut rng, width) {
        let name = format!("not_{}", draft.names[*target]);
        let neg = draft.atom(name);
        let pool = if distractor_all.is_empty() || rng.random_bool(0.5) {
            &supported_all
        } else {
            &distractor_all
        };
        let premise = *pool.choose(&mut rng).expect("non-empty pool");
        draft.clauses.push((neg, vec![premise]));
        draft.exclusive.push((*target, neg));
    }
    draft.assemble(
        TaskMeta {
            family: Family::Conflict,
            depth,
            width,
            seed,
        },
        &mut rng,
    )
}

fn relation(k: usize) -> String {
    match k {
        1 => "parent".into(),
        2 => "grandparent".into(),
        _ => format!("great{}_grandparent", k - 2),
    }
}

/// Two pedigrees of `chain_length + 1` people. Relation-instance atoms
/// `rel_k(i, i + k)` compose as `rel_k(i, j) :- rel_{k-1}(i, j - 1),
/// parent(j - 1, j)`. The first family has every parent link as a fact;
/// the second is missing one link, so compositions spanning it fail.
pub fn gen_kinship(chain_length: usize, seed: u64) -> Result<SyntheticTask> {
    if !(2..=MAX_CHAIN).contains(&chain_length) {
        return Err(Error::BadParams(format!(
            "chain length must be in 2..={MAX_CHAIN}, got {chain_length}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draft = Draft::default();
    let broken = rng.random_range(0..chain_length);
    for (family, missing) in [("p", None), ("q", Some(broken))] {
        // ids[k][i] is rel_k(i, i + k)
        let mut ids: Vec<Vec<usize>> = vec![Vec::new()];
        for k in 1..=chain_length {
            let row: Vec<usize> = (0..=chain_length - k)
                .map(|i| draft.atom(format!("{}_{family}{i}_{family}{}", relation(k), i + k)))
                .collect();
            ids.push(row);
        }
        for (i, &atom) in ids[1].iter().enumerate() {
            if missing != Some(i) {
                draft.facts.push(atom);
            }
        }
        for k in 2..=chain_length {
            for i in 0..=chain_length - k {
                let j = i + k;
                draft.clauses.push((ids[k][i], vec![ids[k - 1][i], ids[1][j - 1]]));
            }
        }
    }
    draft.assemble(
        TaskMeta {
            family: Family::Kinship,
            depth: chain_length,
            width: 1,
            seed,
        },
        &mut rng,
    )
}
