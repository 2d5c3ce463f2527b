//! Analytic-gradient training of the learned filter, gate, rule weights and
//! threshold.

mod adam;
mod grad;
mod model;
mod params;
mod train;

pub use adam::{adam_step, AdamConfig, OptimizerState};
pub use grad::{
    grad_gate, grad_rule_weights, grad_theta, grad_theta_from_terms, grad_threshold, loss, loss_gradient,
    GateGradient, Labels, ThresholdGradient, PROB_CLIP,
};
pub use model::{batch_loss_and_grad, forward, prepare_task, task_loss_and_grad, ForwardPass, PreparedTask};
pub use params::{ParamGroup, TrainableParams, REFERENCE_LAMBDA_MAX};
pub use train::{train, Checkpoint, CheckpointMeta, EpochMetrics, TrainOutcome, TrainRun};
