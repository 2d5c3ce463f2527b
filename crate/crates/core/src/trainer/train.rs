//! Mini-batch training with per-epoch validation and early stopping.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamConfig, OptimizerState};
use super::model::{batch_loss_and_grad, prepare_task, PreparedTask};
use super::params::TrainableParams;
use crate::error::{Error, Result};
use crate::harness::{evaluate, Dataset, EvalOptions};
use crate::pipeline::{Pipeline, PipelineConfig};
use crate::rules::SpectralRule;

pub const MAX_EPOCHS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainRun {
    pub max_epochs: usize,
    pub batch_size: usize,
    pub patience: usize,
    pub adam: AdamConfig,
    /// Time validation passes for the checkpoint tie-break. Off keeps every
    /// output a pure function of the seed.
    pub measure_latency: bool,
    /// Seed of the per-epoch shuffle.
    pub seed: u64,
}

impl Default for TrainRun {
    fn default() -> Self {
        Self {
            max_epochs: MAX_EPOCHS,
            batch_size: 32,
            patience: 5,
            adam: AdamConfig::default(),
            measure_latency: false,
            seed: 0,
        }
    }
}

impl TrainRun {
    pub fn validate(&self) -> Result<()> {
        if self.max_epochs == 0 || self.max_epochs > MAX_EPOCHS {
            return Err(Error::BadParams(format!("epochs must be in 1..={MAX_EPOCHS}")));
        }
        if self.patience == 0 || self.batch_size == 0 {
            return Err(Error::BadParams("patience and batch size must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_acc: f64,
    pub latency_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub epoch: usize,
    pub val_accuracy: f64,
    pub latency_ms: Option<f64>,
    pub epochs_run: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub config: PipelineConfig,
    pub rules: Vec<SpectralRule>,
    pub params: TrainableParams,
    pub optimizer: OptimizerState,
    pub meta: CheckpointMeta,
}

impl Checkpoint {
    pub fn pipeline(&self) -> Result<Pipeline> {
        Pipeline::with_params(self.config.clone(), self.rules.clone(), self.params.clone())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ckpt: Self = serde_json::from_str(text)?;
        ckpt.pipeline()?;
        Ok(ckpt)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_json()?)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&crate::io::read_text(path)?)
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub best: Checkpoint,
    pub history: Vec<EpochMetrics>,
    /// Parameters after each epoch, starting with the initial ones.
    pub trajectory: Vec<TrainableParams>,
}

impl TrainOutcome {
    /// `epoch,train_loss,val_acc,latency_ms`; latency is empty when not measured.
    pub fn metrics_csv(&self) -> String {
        let mut out = String::from("epoch,train_loss,val_acc,latency_ms\n");
        for m in &self.history {
            let latency = m.latency_ms.map(|l| l.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{},{},{},{}", m.epoch, m.train_loss, m.val_acc, latency);
        }
        out
    }
}

fn better(acc: f64, latency: Option<f64>, best: &CheckpointMeta) -> bool {
    if acc != best.val_accuracy {
        return acc > best.val_accuracy;
    }
    matches!((latency, best.latency_ms), (Some(a), Some(b)) if a < b)
}

/// Train from `pipeline`'s current parameters. The returned checkpoint is
/// the epoch with the highest validation accuracy; ties go to the lower
/// measured latency, then to the earlier epoch.
pub fn train(pipeline: &Pipeline, data: &Dataset, run: &TrainRun) -> Result<TrainOutcome> {
    run.validate()?;
    if data.train.is_empty() || data.validation.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let config = pipeline.config().clone();
    let rules = pipeline.rules().to_vec();
    let prepared: Vec<PreparedTask> = data
        .train
        .iter()
        .map(|t| prepare_task(&config, &rules, &t.graph, &t.x0, &t.labels))
        .collect::<Result<_>>()?;
    let eval_opts = if run.measure_latency {
        EvalOptions::default()
    } else {
        EvalOptions::untimed()
    };

    let mut params = pipeline.params().clone();
    let mut state = OptimizerState::new(&params, run.adam);
    let mut rng = ChaCha8Rng::seed_from_u64(run.seed);
    let mut order: Vec<usize> = (0..prepared.len()).collect();
    let mut history = Vec::new();
    let mut trajectory = vec![params.clone()];
    let mut best: Option<Checkpoint> = None;
    let mut since_improvement = 0;

    for epoch in 1..=run.max_epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut batches = 0;
        for chunk in order.chunks(run.batch_size) {
            let batch: Vec<&PreparedTask> = chunk.iter().map(|&i| &prepared[i]).collect();
            let (loss, grads) = batch_loss_and_grad(&params, &batch)?;
            if loss.is_nan() {
                return Err(Error::DivergedLoss { epoch });
            }
            adam_step(&mut params, &grads, &mut state)?;
            loss_sum += loss;
            batches += 1;
        }
        let train_loss = loss_sum / batches as f64;

        let candidate = Pipeline::with_params(config.clone(), rules.clone(), params.clone())?;
        let report = evaluate(&candidate, &data.validation, &eval_opts)?;
        let latency_ms = report.latency.map(|l| l.median_ms);
        history.push(EpochMetrics {
            epoch,
            train_loss,
            val_acc: report.accuracy,
            latency_ms,
        });
        trajectory.push(params.clone());

        let improved = best.as_ref().is_none_or(|b| report.accuracy > b.meta.val_accuracy);
        if best.as_ref().is_none_or(|b| better(report.accuracy, latency_ms, &b.meta)) {
            best = Some(Checkpoint {
                config: config.clone(),
                rules: rules.clone(),
                params: params.clone(),
                optimizer: state.clone(),
                meta: CheckpointMeta {
                    epoch,
                    val_accuracy: report.accuracy,
                    latency_ms,
                    epochs_run: 0,
                    seed: config.seed,
                },
            });
        }
        if improved {
            since_improvement = 0;
        } else {
            since_improvement += 1;
            if since_improvement >= run.patience {
                break;
            }
        }
    }
    let mut best = best.expect("at least one epoch ran");
    best.meta.epochs_run = history.len();
    Ok(TrainOutcome {
        best,
        history,
        trajectory,
    })
}
