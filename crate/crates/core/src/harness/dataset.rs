//! Seed-partitioned train/validation/test splits and their on-disk layout.
//!
//! ```text
//! <dir>/dataset.json        generation parameters
//! <dir>/rules.txt           default rule set
//! <dir>/<split>/task_00000/{graph.txt, kb.txt, signal.csv, labels.csv, meta.json}
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::generate::{gen_conflict, gen_kinship, gen_transitive_with, TransitiveParams, DEFAULT_DISTRACTOR_RATIO};
use super::task::{Family, SyntheticTask, TaskMeta};
use crate::error::{Error, Result};
use crate::io::{format_graph_text, format_labels, format_signal, parse_graph_text, parse_labels, parse_signal};
use crate::rules::{format_rules, SpectralRule, TemplateKind, TemplateParams, TemplateSpec};
use crate::symbolic::KnowledgeBase;

pub const SPLITS: [&str; 3] = ["train", "val", "test"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub family: Family,
    /// Per-task depth (or chain length) is drawn uniformly up to this.
    pub max_depth: usize,
    pub width: usize,
    pub count: usize,
    pub seed: u64,
    pub distractor_ratio: f64,
}

impl DatasetSpec {
    pub fn new(family: Family, max_depth: usize, count: usize, seed: u64) -> Self {
        Self {
            family,
            max_depth,
            width: 2,
            count,
            seed,
            distractor_ratio: DEFAULT_DISTRACTOR_RATIO,
        }
    }

    /// 80/10/10 split sizes.
    pub fn split_sizes(&self) -> [usize; 3] {
        let train = self.count * 8 / 10;
        let val = self.count / 10;
        [train, val, self.count - train - val]
    }
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub spec: DatasetSpec,
    pub train: Vec<SyntheticTask>,
    pub validation: Vec<SyntheticTask>,
    pub test: Vec<SyntheticTask>,
}

impl Dataset {
    pub fn splits(&self) -> [&[SyntheticTask]; 3] {
        [&self.train, &self.validation, &self.test]
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d4_9d4b_b133_111e);
    z ^ (z >> 31)
}

/// Seed of task `index` in split `split`. The split occupies the top byte
/// before mixing, so splits draw from disjoint seed streams.
pub fn task_seed(base: u64, split: usize, index: usize) -> u64 {
    splitmix64(splitmix64(base) ^ ((split as u64) << 56) ^ index as u64)
}

fn gen_one(spec: &DatasetSpec, seed: u64) -> Result<SyntheticTask> {
    let depth_draw = splitmix64(seed ^ 0xdead_beef) as usize;
    match spec.family {
        Family::Transitive => {
            let depth = 1 + depth_draw % spec.max_depth;
            gen_transitive_with(
                &TransitiveParams {
                    depth,
                    width: spec.width,
                    distractor_ratio: spec.distractor_ratio,
                },
                seed,
            )
        }
        Family::Conflict => gen_conflict(1 + depth_draw % spec.max_depth, spec.width, seed),
        Family::Kinship => {
            let span = spec.max_depth.max(2) - 1;
            gen_kinship(2 + depth_draw % span, seed)
        }
    }
}

pub fn generate_dataset(spec: &DatasetSpec) -> Result<Dataset> {
    if spec.max_depth == 0 {
        return Err(Error::BadParams("max depth must be >= 1".into()));
    }
    let sizes = spec.split_sizes();
    let mut splits = sizes.iter().enumerate().map(|(split, &size)| {
        (0..size)
            .map(|i| gen_one(spec, task_seed(spec.seed, split, i)))
            .collect::<Result<Vec<_>>>()
    });
    Ok(Dataset {
        spec: spec.clone(),
        train: splits.next().expect("three splits")?,
        validation: splits.next().expect("three splits")?,
        test: splits.next().expect("three splits")?,
    })
}

/// Rule set shipped with generated data: one low-pass propagation rule.
pub fn default_rules() -> Vec<SpectralRule> {
    let template = TemplateSpec::builtin(
        TemplateKind::LowPass,
        TemplateParams {
            beta: Some(1.0),
            ..TemplateParams::default()
        },
    );
    vec![SpectralRule::new("propagate", template, 1.0).expect("valid weight")]
}

pub fn write_task(dir: &Path, task: &SyntheticTask) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("graph.txt"), format_graph_text(&task.graph))?;
    fs::write(dir.join("kb.txt"), task.kb.to_text())?;
    fs::write(dir.join("signal.csv"), format_signal(task.x0.values()))?;
    fs::write(dir.join("labels.csv"), format_labels(&task.labels))?;
    fs::write(dir.join("meta.json"), serde_json::to_string_pretty(&task.meta)? + "\n")?;
    Ok(())
}

pub fn read_task(dir: &Path) -> Result<SyntheticTask> {
    let graph = parse_graph_text(&crate::io::read_text(&dir.join("graph.txt"))?)?;
    let kb = KnowledgeBase::parse(&crate::io::read_text(&dir.join("kb.txt"))?)?;
    let x0 = parse_signal(&crate::io::read_text(&dir.join("signal.csv"))?)?;
    let labels = parse_labels(&crate::io::read_text(&dir.join("labels.csv"))?)?;
    let meta: TaskMeta = serde_json::from_str(&crate::io::read_text(&dir.join("meta.json"))?)?;
    Ok(SyntheticTask {
        graph,
        x0,
        kb,
        labels,
        meta,
    })
}

pub fn write_dataset(dir: &Path, data: &Dataset) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("dataset.json"), serde_json::to_string_pretty(&data.spec)? + "\n")?;
    fs::write(dir.join("rules.txt"), format_rules(&default_rules()))?;
    for (name, tasks) in SPLITS.iter().zip(data.splits()) {
        for (i, task) in tasks.iter().enumerate() {
            write_task(&dir.join(name).join(format!("task_{i:05}")), task)?;
        }
    }
    Ok(())
}

fn read_split(dir: &Path) -> Result<Vec<SyntheticTask>> {
    if !dir.exists() {
        return Ok(Vec::new());
    }
    let mut entries: Vec<_> = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    entries.retain(|p| p.is_dir());
    entries.sort();
    entries.iter().map(|p| read_task(p)).collect()
}

pub fn read_dataset(dir: &Path) -> Result<Dataset> {
    let spec: DatasetSpec = serde_json::from_str(&crate::io::read_text(&dir.join("dataset.json"))?)?;
    Ok(Dataset {
        spec,
        train: read_split(&dir.join(SPLITS[0]))?,
        validation: read_split(&dir.join(SPLITS[1]))?,
        test: read_split(&dir.join(SPLITS[2]))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn split_sizes_and_disjoint_seeds() {
        let spec = DatasetSpec::new(Family::Transitive, 5, 50, 0);
        assert_eq!(spec.split_sizes(), [40, 5, 5]);
        let d = generate_dataset(&spec).unwrap();
        let seeds: Vec<u64> = d.splits().iter().flat_map(|s| s.iter().map(|t| t.meta.seed)).collect();
        let unique: BTreeSet<_> = seeds.iter().collect();
        assert_eq!(unique.len(), seeds.len());
        assert!(d.train.iter().all(|t| (1..=5).contains(&t.meta.depth)));
    }

    #[test]
    fn write_read_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let spec = DatasetSpec::new(Family::Kinship, 4, 10, 3);
        let d = generate_dataset(&spec).unwrap();
        write_dataset(dir.path(), &d).unwrap();
        let back = read_dataset(dir.path()).unwrap();
        assert_eq!(back.spec, spec);
        for (a, b) in d.splits().iter().zip(back.splits()) {
            assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(b) {
                assert_eq!(x.kb, y.kb);
                assert_eq!(x.labels, y.labels);
                assert_eq!(x.graph.edges(), y.graph.edges());
                assert_eq!(x.x0.values(), y.x0.values());
            }
        }
    }
}
