//! Pick-prediction metrics, the random baseline, Kendall's tau-b and the
//! embedding export.

mod embeddings;
mod kendall;
mod metrics;

pub use embeddings::{export_embeddings, write_embeddings_csv, EmbeddingExport, EmbeddingRow};
pub use kendall::kendall_tau;
pub use metrics::{
    evaluate, evaluate_checkpoint, per_pick_curve, random_baseline, score_decision, write_curve_csv, EvalReport,
};
