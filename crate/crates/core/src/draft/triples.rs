use super::log::Draft;
use crate::preference::{CardId, PreferenceTriple};

/// Pair counts of a draft: `raw` is Σ(k−1) over all picks; `degenerate` are
/// the pairs whose negative is another copy of the picked card.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PairCounts {
    pub raw: usize,
    pub degenerate: usize,
}

impl PairCounts {
    pub fn emitted(&self) -> usize {
        self.raw - self.degenerate
    }
}

impl std::ops::AddAssign for PairCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.raw += rhs.raw;
        self.degenerate += rhs.degenerate;
    }
}

/// Negatives of a pick: the pack without one copy of the picked card.
fn negatives(pack: &[CardId], picked: CardId) -> impl Iterator<Item = CardId> + '_ {
    let skip = pack.iter().position(|&c| c == picked);
    pack.iter()
        .enumerate()
        .filter(move |(i, _)| Some(*i) != skip)
        .map(|(_, &c)| c)
}

pub fn count_pairs(draft: &Draft) -> PairCounts {
    let mut counts = PairCounts::default();
    for event in draft.players.iter().flatten() {
        for neg in negatives(&event.pack, event.picked) {
            counts.raw += 1;
            if neg == event.picked {
                counts.degenerate += 1;
            }
        }
    }
    counts
}

/// One triple per (pick, other card in the pack), anchored on the pool
/// before the pick. Forced picks yield nothing; a second copy of the picked
/// card is not a valid negative and is skipped.
pub fn generate_triples(draft: &Draft, card_count: usize) -> Vec<PreferenceTriple> {
    let mut out = Vec::with_capacity(count_pairs(draft).emitted());
    for decision in draft.decisions(card_count) {
        for neg in negatives(decision.pack, decision.picked) {
            if neg == decision.picked {
                continue;
            }
            out.push(PreferenceTriple {
                anchor: decision.pool.clone(),
                positive: decision.picked,
                negative: neg,
            });
        }
    }
    out
}
