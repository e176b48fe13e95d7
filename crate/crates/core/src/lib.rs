//! Preference learning for set-addition problems.
//!
//! Two ways to learn which candidate best extends a set, both built on one
//! shared dense network:
//!
//! * **CPR** (contextual preference ranking): a triplet network embeds the
//!   current pool and each candidate; candidates closer to the pool rank higher.
//! * **RankNet**: a twin network scores each extended set `C ∪ {c}`; higher
//!   scores rank higher.
//!
//! The crate covers the card-draft domain end to end: catalog and draft-log
//! parsing, preference-triple generation, a synthetic draft generator with a
//! known utility, deterministic training with checkpoints, evaluation metrics,
//! an HTTP ranking service and the `draftrank` command-line tool.

pub mod cli;
pub mod draft;
pub mod error;
pub mod eval;
pub mod nn;
pub mod preference;
pub mod rng;
pub mod service;
pub mod training;

pub use error::{Error, Result};
