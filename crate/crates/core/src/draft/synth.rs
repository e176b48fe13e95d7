//! Synthetic drafts from a planted set utility
//! `u(S) = Σ s_c + β · Σ_colors count_color(S)²`.
//!
//! Packs hold 15 distinct cards drawn uniformly from the catalog. Packs pass
//! left in rounds 0 and 2 and right in round 1.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::log::{Draft, PICKS_PER_ROUND, PLAYERS, ROUNDS};
use crate::error::{Error, Result};
use crate::preference::CardId;
use crate::rng::{self, Stream};

pub const COLORS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Color {
    Colored(u8),
    Colorless,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedOracle {
    pub strengths: Vec<f64>,
    pub colors: Vec<Color>,
    pub beta: f64,
}

impl PlantedOracle {
    /// Strengths uniform in [0, 1); each card one of five colors or colorless
    /// with equal probability.
    pub fn random(card_count: usize, beta: f64, seed: u64) -> Self {
        let mut s = rng::stream(seed, &[rng::ORACLE]);
        let strengths = (0..card_count).map(|_| s.random::<f64>()).collect();
        let colors = (0..card_count)
            .map(|_| match s.random_range(0..=COLORS as u8) {
                c if (c as usize) < COLORS => Color::Colored(c),
                _ => Color::Colorless,
            })
            .collect();
        PlantedOracle {
            strengths,
            colors,
            beta,
        }
    }

    pub fn card_count(&self) -> usize {
        self.strengths.len()
    }

    pub fn strongest(&self) -> CardId {
        let best = (0..self.card_count())
            .max_by(|&a, &b| self.strengths[a].total_cmp(&self.strengths[b]).then(b.cmp(&a)))
            .unwrap_or(0);
        CardId(best as u32)
    }

    pub fn color_counts(&self, pool: &[CardId]) -> [u32; COLORS] {
        let mut counts = [0; COLORS];
        for c in pool {
            if let Color::Colored(k) = self.colors[c.index()] {
                counts[k as usize] += 1;
            }
        }
        counts
    }

    pub fn utility(&self, pool: &[CardId]) -> f64 {
        let strength: f64 = pool.iter().map(|c| self.strengths[c.index()]).sum();
        let synergy: f64 = self
            .color_counts(pool)
            .iter()
            .map(|&n| f64::from(n) * f64::from(n))
            .sum();
        strength + self.beta * synergy
    }

    /// `u(C ∪ {card}) − u(C)` given the color counts of `C`.
    pub fn gain(&self, counts: &[u32; COLORS], card: CardId) -> f64 {
        let bonus = match self.colors[card.index()] {
            Color::Colored(k) => self.beta * f64::from(2 * counts[k as usize] + 1),
            Color::Colorless => 0.0,
        };
        self.strengths[card.index()] + bonus
    }

    /// Position in `pack` the oracle player takes: greedy (lowest id on ties)
    /// at temperature 0, otherwise softmax of gain / temperature.
    pub fn choose(&self, counts: &[u32; COLORS], pack: &[CardId], temperature: f64, s: &mut Stream) -> usize {
        let gains: Vec<f64> = pack.iter().map(|&c| self.gain(counts, c)).collect();
        if temperature == 0.0 {
            return (0..pack.len())
                .max_by(|&a, &b| gains[a].total_cmp(&gains[b]).then(pack[b].cmp(&pack[a])))
                .expect("non-empty pack");
        }
        let top = gains.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = gains.iter().map(|g| ((g - top) / temperature).exp()).collect();
        let mut target = s.random::<f64>() * weights.iter().sum::<f64>();
        for (i, w) in weights.iter().enumerate() {
            if target < *w {
                return i;
            }
            target -= w;
        }
        pack.len() - 1
    }
}

/// Draft number `index` of the stream identified by `seed`.
pub fn synth_draft(index: u64, oracle: &PlantedOracle, temperature: f64, seed: u64) -> Result<Draft> {
    if !(temperature >= 0.0 && temperature.is_finite()) {
        return Err(Error::Usage(format!(
            "temperature must be a finite value >= 0, got {temperature}"
        )));
    }
    let card_count = oracle.card_count();
    if card_count < PICKS_PER_ROUND {
        return Err(Error::Usage(format!(
            "catalog of {card_count} cards cannot fill a pack of {PICKS_PER_ROUND}"
        )));
    }
    let mut s = rng::stream(seed, &[rng::SYNTH, index]);
    let mut picks: Vec<Vec<(Vec<CardId>, CardId)>> = vec![Vec::new(); PLAYERS];
    let mut pools: Vec<Vec<CardId>> = vec![Vec::new(); PLAYERS];
    for round in 0..ROUNDS {
        let mut packs: Vec<Vec<CardId>> = (0..PLAYERS)
            .map(|_| {
                index::sample(&mut s, card_count, PICKS_PER_ROUND)
                    .into_iter()
                    .map(|i| CardId(i as u32))
                    .collect()
            })
            .collect();
        for _ in 0..PICKS_PER_ROUND {
            for p in 0..PLAYERS {
                let counts = oracle.color_counts(&pools[p]);
                let pos = oracle.choose(&counts, &packs[p], temperature, &mut s);
                let pack = packs[p].clone();
                let card = packs[p].remove(pos);
                pools[p].push(card);
                picks[p].push((pack, card));
            }
            // Player p receives the pack of their right (round 0, 2) or left neighbour.
            if round % 2 == 0 {
                packs.rotate_right(1);
            } else {
                packs.rotate_left(1);
            }
        }
    }
    Draft::from_picks(format!("synth-{seed}-{index:06}"), picks, card_count)
}

pub fn synth_drafts(n_drafts: usize, oracle: &PlantedOracle, temperature: f64, seed: u64) -> Result<Vec<Draft>> {
    if n_drafts == 0 {
        return Err(Error::Usage("need at least one draft".into()));
    }
    (0..n_drafts as u64)
        .map(|i| synth_draft(i, oracle, temperature, seed))
        .collect()
}
