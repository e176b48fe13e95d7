use std::path::Path;

use super::catalog::CardCatalog;
use super::log::Draft;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CardCounts {
    /// Times the card was in a pack a player picked from (per copy).
    pub offered: u64,
    pub chosen: u64,
    /// Same, restricted to the very first pick of the draft (round 0, pick 0).
    pub first_offered: u64,
    pub first_chosen: u64,
}

impl CardCounts {
    pub fn pick_rate(&self) -> Option<f64> {
        (self.offered > 0).then(|| self.chosen as f64 / self.offered as f64)
    }

    pub fn first_pick_rate(&self) -> Option<f64> {
        (self.first_offered > 0).then(|| self.first_chosen as f64 / self.first_offered as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CardStats {
    pub cards: Vec<CardCounts>,
}

pub fn compute_stats(drafts: &[Draft], card_count: usize) -> Result<CardStats> {
    if drafts.is_empty() {
        return Err(Error::Usage("statistics need at least one draft".into()));
    }
    let mut cards = vec![CardCounts::default(); card_count];
    for event in drafts.iter().flat_map(|d| d.players.iter().flatten()) {
        let first = event.pack_round == 0 && event.pick_index == 0;
        for &c in &event.pack {
            let entry = cards
                .get_mut(c.index())
                .ok_or_else(|| Error::Catalog(format!("card id {c} outside catalog")))?;
            entry.offered += 1;
            if first {
                entry.first_offered += 1;
            }
        }
        let entry = &mut cards[event.picked.index()];
        entry.chosen += 1;
        if first {
            entry.first_chosen += 1;
        }
    }
    Ok(CardStats { cards })
}

impl CardStats {
    pub fn pick_rates(&self) -> Vec<Option<f64>> {
        self.cards.iter().map(CardCounts::pick_rate).collect()
    }

    pub fn first_pick_rates(&self) -> Vec<Option<f64>> {
        self.cards.iter().map(CardCounts::first_pick_rate).collect()
    }

    /// CSV with rates to 6 decimals; a rate with no offers is written as 0.
    pub fn to_csv_string(&self, catalog: &CardCatalog) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "card_id",
            "name",
            "offered",
            "chosen",
            "pick_rate",
            "first_offered",
            "first_chosen",
            "first_pick_rate",
        ])
        .expect("in-memory write");
        for (id, name) in catalog.entries() {
            let c = self.cards.get(id.index()).copied().unwrap_or_default();
            w.write_record([
                id.to_string(),
                name.to_string(),
                c.offered.to_string(),
                c.chosen.to_string(),
                format!("{:.6}", c.pick_rate().unwrap_or(0.0)),
                c.first_offered.to_string(),
                c.first_chosen.to_string(),
                format!("{:.6}", c.first_pick_rate().unwrap_or(0.0)),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    pub fn write_csv(&self, path: impl AsRef<Path>, catalog: &CardCatalog) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv_string(catalog)).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::draft::{synth_drafts, PlantedOracle};

    #[test]
    fn always_chosen_card_has_rate_one() {
        // Greedy, no synergy: the strongest card is taken whenever offered.
        let oracle = PlantedOracle::random(50, 0.0, 4);
        let best = oracle.strongest();
        let drafts = synth_drafts(5, &oracle, 0.0, 4).unwrap();
        let stats = compute_stats(&drafts, 50).unwrap();
        assert!(stats.cards[best.index()].offered > 0);
        assert_eq!(stats.cards[best.index()].pick_rate(), Some(1.0));
    }

    #[test]
    fn complete_drafts_respect_minimum_rate() {
        let oracle = PlantedOracle::random(60, 0.1, 9);
        let drafts = synth_drafts(6, &oracle, 0.5, 9).unwrap();
        let stats = compute_stats(&drafts, 60).unwrap();
        for rate in stats.pick_rates().into_iter().flatten() {
            assert!((1.0 / 15.0..=1.0).contains(&rate), "{rate}");
        }
    }

    #[test]
    fn empty_input_rejected() {
        assert!(compute_stats(&[], 10).is_err());
    }
}
