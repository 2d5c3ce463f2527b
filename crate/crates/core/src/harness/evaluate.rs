use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::task::SyntheticTask;
use crate::error::{Error, Result};
use crate::pipeline::Pipeline;

/// What a model says about one task.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskPrediction {
    /// Predicted truth for every node.
    pub truth: Vec<bool>,
    /// Exclusive pairs violated by the resulting closure.
    pub conflicts: usize,
}

pub trait Predictor {
    fn predict(&self, task: &SyntheticTask) -> Result<TaskPrediction>;
}

impl Predictor for Pipeline {
    fn predict(&self, task: &SyntheticTask) -> Result<TaskPrediction> {
        let out = self.run(&task.graph, &task.x0, &task.kb)?;
        Ok(TaskPrediction {
            truth: out.predicates.truth(),
            conflicts: out.conflicts.len(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub measure_latency: bool,
    /// Untimed runs before measuring.
    pub warmup: usize,
    /// Timed runs per task; the task's latency is their median.
    pub repetitions: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            measure_latency: true,
            warmup: 3,
            repetitions: 3,
        }
    }
}

impl EvalOptions {
    pub fn untimed() -> Self {
        Self {
            measure_latency: false,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatencyStats {
    pub median_ms: f64,
    pub p95_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub tasks: usize,
    pub labeled: usize,
    pub correct: usize,
    pub accuracy: f64,
    /// Fraction of tasks whose closure has no conflicting pair.
    pub consistency: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub latency: Option<LatencyStats>,
}

/// Nearest-rank percentile of sorted data.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Accuracy over labeled nodes, conflict-free rate, and optionally
/// per-task wall time.
pub fn evaluate(model: &dyn Predictor, tasks: &[SyntheticTask], opts: &EvalOptions) -> Result<EvalReport> {
    if tasks.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut labeled = 0;
    let mut correct = 0;
    let mut consistent = 0;
    for task in tasks {
        let pred = model.predict(task)?;
        crate::error::check_len(task.graph.node_count(), pred.truth.len())?;
        for (&node, &label) in &task.labels {
            labeled += 1;
            if pred.truth[node] == label {
                correct += 1;
            }
        }
        if pred.conflicts == 0 {
            consistent += 1;
        }
    }
    let latency = if opts.measure_latency {
        for task in tasks.iter().cycle().take(opts.warmup) {
            model.predict(task)?;
        }
        let reps = opts.repetitions.max(1);
        let mut per_task = Vec::with_capacity(tasks.len());
        for task in tasks {
            let mut samples = Vec::with_capacity(reps);
            for _ in 0..reps {
                let start = Instant::now();
                model.predict(task)?;
                samples.push((start.elapsed().as_secs_f64() * 1e3).max(1e-6));
            }
            samples.sort_by(f64::total_cmp);
            per_task.push(median(&samples));
        }
        per_task.sort_by(f64::total_cmp);
        Some(LatencyStats {
            median_ms: median(&per_task),
            p95_ms: percentile(&per_task, 0.95),
        })
    } else {
        None
    };
    Ok(EvalReport {
        tasks: tasks.len(),
        labeled,
        correct,
        accuracy: if labeled == 0 { 1.0 } else { correct as f64 / labeled as f64 },
        consistency: consistent as f64 / tasks.len() as f64,
        latency,
    })
}
