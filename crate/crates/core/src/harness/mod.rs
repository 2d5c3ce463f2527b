//! Synthetic reasoning tasks, evaluation and scaling measurements.

mod bench;
mod dataset;
mod evaluate;
mod generate;
mod task;

pub use bench::{
    log_log_slope, random_sparse_graph, scaling_benchmark, time_filter, BenchOptions, ScalingReport, ScalingRow,
    MEAN_DEGREE,
};
pub use dataset::{
    default_rules, generate_dataset, read_dataset, read_task, task_seed, write_dataset, write_task, Dataset,
    DatasetSpec, SPLITS,
};
pub use evaluate::{evaluate, EvalOptions, EvalReport, LatencyStats, Predictor, TaskPrediction};
pub use generate::{
    gen_conflict, gen_kinship, gen_transitive, gen_transitive_with, TransitiveParams, DEFAULT_DISTRACTOR_RATIO,
    MAX_CHAIN, MAX_DEPTH,
};
pub use task::{Family, SyntheticTask, TaskMeta};
