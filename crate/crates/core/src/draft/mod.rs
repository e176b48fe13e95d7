//! Card catalog, draft logs, preference-example generation, statistics and
//! a synthetic draft generator with a known utility function.

mod catalog;
mod log;
mod split;
mod stats;
mod synth;
mod triples;

pub use catalog::{load_catalog, CardCatalog, CatalogFingerprint};
pub use log::{
    parse_draft_log, parse_draft_log_str, parse_draft_log_with_card_count, write_draft_log,
    Decision, Draft, PickEvent, PICKS_PER_PLAYER, PICKS_PER_ROUND, PLAYERS, ROUNDS,
};
pub use split::split_drafts;
pub use stats::{compute_stats, CardCounts, CardStats};
pub use synth::{synth_draft, synth_drafts, Color, PlantedOracle};
pub use triples::{count_pairs, generate_triples, PairCounts};
