//! Dataset splitting, sliding-window samples, the training loop, evaluation
//! and random hyperparameter search.

mod config;
mod metrics;
mod samples;
mod search;
mod split;
mod trainer;

pub use config::{EpochRecord, TrainConfig};
pub use metrics::{
    baseline_persistence, evaluate, filter_scenarios, persistence_prediction, predict_samples,
    Metrics,
};
pub use samples::{build_samples, make_samples, pe_table, sequence_graphs, Sample, SampleSet};
pub use search::{hyperparameter_search, SearchResult, SearchSpace, TrialRecord};
pub use split::{split_dataset, split_sizes};
pub use trainer::{sample_loss_and_grads, train, train_from, TrainOutcome};
