mod common;

use common::*;
use spectral_nsr::harness::{default_rules, evaluate, generate_dataset, Dataset, DatasetSpec, EvalOptions, Family};
use spectral_nsr::pipeline::{Pipeline, PipelineConfig};
use spectral_nsr::trainer::{adam_step, train, AdamConfig, Checkpoint, OptimizerState, TrainRun, TrainableParams};
use spectral_nsr::Error;

fn data(count: usize) -> Dataset {
    generate_dataset(&DatasetSpec::new(Family::Transitive, 5, count, 0)).unwrap()
}

fn pipeline() -> Pipeline {
    Pipeline::new(PipelineConfig::default(), default_rules()).unwrap()
}

fn params() -> TrainableParams {
    TrainableParams::init(&PipelineConfig { bands: 2, order: 3, ..PipelineConfig::default() }, &default_rules()).unwrap()
}

#[test]
fn first_adam_step_moves_each_coordinate_by_its_learning_rate() {
    let mut r = rng(50);
    let start = params();
    let mut grads = start.zeros_like();
    let mut flat = random_vec(grads.flatten().len(), &mut r);
    // keep the rule weight step away from the clamp
    let rw = start.slots().iter().take_while(|(n, _, _)| n != "rule_weights").map(|(_, _, v)| v.len()).sum::<usize>();
    flat[rw] = 0.3;
    grads.unflatten(&flat).unwrap();
    let cfg = AdamConfig::default();
    let mut state = OptimizerState::new(&start, cfg);
    let mut moved = start.clone();
    adam_step(&mut moved, &grads, &mut state).unwrap();
    assert_eq!(state.step, 1);
    // m_hat = g and v_hat = g^2, so each step is lr * g / (|g| + eps)
    let (before, after) = (start.flatten(), moved.flatten());
    let mut i = 0;
    for (_, group, values) in start.slots() {
        for _ in 0..values.len() {
            let g = flat[i];
            let want = before[i] - cfg.lr(group) * g / (g.abs() + cfg.eps);
            assert!((after[i] - want).abs() <= 1e-15, "coordinate {i}");
            i += 1;
        }
    }
}

#[test]
fn adam_clamps_rule_weights_and_rejects_non_finite_gradients() {
    let mut start = params();
    start.rule_weights = vec![1e-6];
    let mut grads = start.zeros_like();
    grads.rule_weights = vec![1.0];
    let mut state = OptimizerState::new(&start, AdamConfig::default());
    let mut p = start.clone();
    adam_step(&mut p, &grads, &mut state).unwrap();
    assert_eq!(p.rule_weights, vec![0.0]);

    let mut bad = start.zeros_like();
    bad.bands[1][2] = f64::NAN;
    let mut state = OptimizerState::new(&start, AdamConfig::default());
    let mut q = start.clone();
    match adam_step(&mut q, &bad, &mut state) {
        Err(Error::NonFiniteGradient { param }) => assert_eq!(param, "theta[1][2]"),
        other => panic!("unexpected {other:?}"),
    }
    assert_eq!(q, start);
    assert_eq!(state.step, 0);
}

#[test]
fn zero_learning_rate_keeps_parameters_and_stops_after_patience() {
    let data = data(60);
    let adam = AdamConfig { lr_spectral: 0.0, lr_embedding: 0.0, ..AdamConfig::default() };
    let run = TrainRun { adam, ..TrainRun::default() };
    let outcome = train(&pipeline(), &data, &run).unwrap();
    let initial = pipeline().params().clone();
    assert!(outcome.trajectory.iter().all(|p| *p == initial));
    // accuracy never improves after the first epoch
    assert_eq!(outcome.history.len(), 1 + run.patience);
    assert_eq!(outcome.best.meta.epoch, 1);
    assert_eq!(outcome.best.meta.epochs_run, outcome.history.len());
    assert!(outcome.history.windows(2).all(|w| w[0].val_acc == w[1].val_acc));
}

#[test]
fn early_epochs_reduce_loss_without_losing_accuracy() {
    let data = data(200);
    let run = TrainRun { max_epochs: 5, ..TrainRun::default() };
    let outcome = train(&pipeline(), &data, &run).unwrap();
    let h = &outcome.history;
    assert_eq!(h.len(), 5);
    assert!(h.windows(2).all(|w| w[1].train_loss < w[0].train_loss));
    assert!(h.windows(2).all(|w| w[1].val_acc >= w[0].val_acc));
    assert!(h[4].val_acc > h[0].val_acc);
}

#[test]
fn checkpoint_reload_reproduces_validation_accuracy() {
    let data = data(100);
    let run = TrainRun { max_epochs: 8, ..TrainRun::default() };
    let outcome = train(&pipeline(), &data, &run).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("best.json");
    outcome.best.save(&path).unwrap();
    let loaded = Checkpoint::load(&path).unwrap();
    assert_eq!(loaded, outcome.best);
    let report = evaluate(&loaded.pipeline().unwrap(), &data.validation, &EvalOptions::untimed()).unwrap();
    assert_eq!(report.accuracy, outcome.best.meta.val_accuracy);
    assert_eq!(outcome.history[outcome.best.meta.epoch - 1].val_acc, report.accuracy);
    // the best epoch has the highest validation accuracy, earliest on ties
    let top = outcome.history.iter().map(|m| m.val_acc).fold(f64::NEG_INFINITY, f64::max);
    let first_top = outcome.history.iter().find(|m| m.val_acc == top).unwrap().epoch;
    assert_eq!(outcome.best.meta.epoch, first_top);
}

#[test]
fn trajectories_are_deterministic() {
    let data = data(80);
    let run = TrainRun { max_epochs: 4, seed: 3, ..TrainRun::default() };
    let a = train(&pipeline(), &data, &run).unwrap();
    let b = train(&pipeline(), &data, &run).unwrap();
    assert_eq!(a.trajectory, b.trajectory);
    assert_eq!(a.metrics_csv(), b.metrics_csv());
    let c = train(&pipeline(), &data, &TrainRun { seed: 4, ..run }).unwrap();
    assert_ne!(a.trajectory, c.trajectory);
}

#[test]
fn metrics_csv_layout() {
    let outcome = train(&pipeline(), &data(40), &TrainRun { max_epochs: 2, ..TrainRun::default() }).unwrap();
    let csv = outcome.metrics_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "epoch,train_loss,val_acc,latency_ms");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("1,") && lines[1].ends_with(','));
    assert_eq!(outcome.trajectory.len(), 3);
}

#[test]
fn training_rejects_bad_runs() {
    let d = data(40);
    assert!(train(&pipeline(), &d, &TrainRun { max_epochs: 51, ..TrainRun::default() }).is_err());
    assert!(train(&pipeline(), &d, &TrainRun { batch_size: 0, ..TrainRun::default() }).is_err());
    let empty = Dataset { train: vec![], ..d };
    assert!(matches!(train(&pipeline(), &empty, &TrainRun::default()), Err(Error::EmptyDataset)));
}
