//! Training loop, configuration and checkpoints.

mod checkpoint;
mod config;
mod trainer;

pub use checkpoint::{load_checkpoint, load_checkpoint_for, save_checkpoint, Checkpoint, FORMAT_VERSION};
pub use config::TrainConfig;
pub use trainer::{
    probe_picks, resume, train, write_log_csv, ProbePick, TrainLogRecord, TrainOutcome, TrainingData,
};
