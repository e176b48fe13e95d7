//! The two preference heads.
//!
//! * CPR (triplet): pool and candidates are embedded by one network; the
//!   better addition is the candidate closer to the pool's embedding.
//! * RankNet (twin): the network scores whole sets `C ∪ {c}`; the better
//!   addition is the candidate giving the higher score.

pub mod encoding;
mod loss;
mod model;
mod step;

use std::sync::Arc;

pub use encoding::{encode_pool, CardId, CardOneHot, PoolVector};
pub use loss::{euclidean_distance, ranknet_loss, triplet_loss, RankNetLoss, TripletLoss, DISTANCE_EPS};
pub use model::{cpr_embed, cpr_rank, ranknet_rank, Embedding, Head, PreferenceModel, RankedCard, RankedPack};
pub use step::{
    batch_gradient, cpr_training_step, ranknet_training_step, BatchObjective, DropoutKey, EvalObjective,
    REDUCTION_CHUNK,
};

/// "`positive` is a better addition to `anchor` than `negative`".
#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceTriple {
    pub anchor: Arc<PoolVector>,
    pub positive: CardId,
    pub negative: CardId,
}
