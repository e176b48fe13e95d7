//! JSON Lines draft logs.
//!
//! One draft per line:
//! `{"draft_id": str, "players": [[{"pack": [int...], "picked": int}, ...45], ...8]}`.
//! Pack round and pick index are implied by position.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::catalog::CardCatalog;
use crate::error::{Error, Result};
use crate::preference::encoding::check_card;
use crate::preference::{CardId, PoolVector};

pub const PLAYERS: usize = 8;
pub const ROUNDS: usize = 3;
pub const PICKS_PER_ROUND: usize = 15;
pub const PICKS_PER_PLAYER: usize = ROUNDS * PICKS_PER_ROUND;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PickEvent {
    pub pack: Vec<CardId>,
    pub picked: CardId,
    pub pack_round: u8,
    pub pick_index: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Draft {
    pub draft_id: String,
    pub players: Vec<Vec<PickEvent>>,
}

/// One pick decision with the pool the player held before making it.
#[derive(Debug, Clone)]
pub struct Decision<'a> {
    pub player: usize,
    pub pack_round: u8,
    pub pick_index: u8,
    pub pool: Arc<PoolVector>,
    pub pack: &'a [CardId],
    pub picked: CardId,
}

#[derive(Serialize, Deserialize)]
struct PickRecord {
    pack: Vec<CardId>,
    picked: CardId,
}

#[derive(Serialize, Deserialize)]
struct DraftRecord {
    draft_id: String,
    players: Vec<Vec<PickRecord>>,
}

impl Draft {
    /// Build a draft from per-player `(pack, picked)` sequences, checking every
    /// structural rule against a catalog of `card_count` cards.
    pub fn from_picks(
        draft_id: impl Into<String>,
        players: Vec<Vec<(Vec<CardId>, CardId)>>,
        card_count: usize,
    ) -> Result<Draft> {
        let draft_id = draft_id.into();
        let fail = |player: usize, pick: usize, reason: String| Error::Validation {
            draft_id: draft_id.clone(),
            player,
            pick,
            reason,
        };
        if players.len() != PLAYERS {
            return Err(fail(0, 0, format!("expected {PLAYERS} players, found {}", players.len())));
        }
        let mut out = Vec::with_capacity(PLAYERS);
        for (p, picks) in players.into_iter().enumerate() {
            if picks.len() != PICKS_PER_PLAYER {
                return Err(fail(
                    p,
                    picks.len(),
                    format!("expected {PICKS_PER_PLAYER} picks, found {}", picks.len()),
                ));
            }
            let mut events = Vec::with_capacity(PICKS_PER_PLAYER);
            for (i, (pack, picked)) in picks.into_iter().enumerate() {
                let pick_index = i % PICKS_PER_ROUND;
                let expected = PICKS_PER_ROUND - pick_index;
                if pack.len() != expected {
                    return Err(fail(
                        p,
                        i,
                        format!("pack has {} cards, expected {expected} at pick index {pick_index}", pack.len()),
                    ));
                }
                for &c in pack.iter().chain(std::iter::once(&picked)) {
                    check_card(c, card_count).map_err(|e| fail(p, i, e.to_string()))?;
                }
                if !pack.contains(&picked) {
                    return Err(fail(p, i, format!("picked card {picked} is not in the pack")));
                }
                events.push(PickEvent {
                    pack,
                    picked,
                    pack_round: (i / PICKS_PER_ROUND) as u8,
                    pick_index: pick_index as u8,
                });
            }
            out.push(events);
        }
        Ok(Draft {
            draft_id,
            players: out,
        })
    }

    /// Every pick in player-major order, each with the pool before the pick.
    pub fn decisions(&self, card_count: usize) -> Vec<Decision<'_>> {
        let mut out = Vec::with_capacity(PLAYERS * PICKS_PER_PLAYER);
        for (player, picks) in self.players.iter().enumerate() {
            let mut pool = PoolVector::empty(card_count);
            for event in picks {
                let before = Arc::new(pool.clone());
                out.push(Decision {
                    player,
                    pack_round: event.pack_round,
                    pick_index: event.pick_index,
                    pool: before,
                    pack: &event.pack,
                    picked: event.picked,
                });
                pool.add(event.picked)
                    .expect("validated drafts only contain catalog ids");
            }
        }
        out
    }

    /// The pool of `player` after all picks.
    pub fn final_pool(&self, player: usize, card_count: usize) -> Result<PoolVector> {
        let picks: Vec<CardId> = self
            .players
            .get(player)
            .ok_or_else(|| Error::Usage(format!("no player {player}")))?
            .iter()
            .map(|e| e.picked)
            .collect();
        crate::preference::encode_pool(&picks, card_count)
    }

    fn to_record(&self) -> DraftRecord {
        DraftRecord {
            draft_id: self.draft_id.clone(),
            players: self
                .players
                .iter()
                .map(|picks| {
                    picks
                        .iter()
                        .map(|e| PickRecord {
                            pack: e.pack.clone(),
                            picked: e.picked,
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(&self.to_record()).expect("draft serialization cannot fail")
    }
}

fn parse_line(line: &str, line_no: usize, origin: &str, card_count: usize) -> Result<Draft> {
    let record: DraftRecord = serde_json::from_str(line)
        .map_err(|e| Error::format(origin, format!("line {line_no}: {e}")))?;
    let players = record
        .players
        .into_iter()
        .map(|picks| picks.into_iter().map(|p| (p.pack, p.picked)).collect())
        .collect();
    Draft::from_picks(record.draft_id, players, card_count)
}

pub fn parse_draft_log_str(text: &str, origin: &str, card_count: usize) -> Result<Vec<Draft>> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l))
        .collect();
    lines
        .par_iter()
        .map(|&(no, line)| parse_line(line, no, origin, card_count))
        .collect()
}

pub fn parse_draft_log_with_card_count(path: impl AsRef<Path>, card_count: usize) -> Result<Vec<Draft>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_draft_log_str(&text, &path.display().to_string(), card_count)
}

pub fn parse_draft_log(path: impl AsRef<Path>, catalog: &CardCatalog) -> Result<Vec<Draft>> {
    parse_draft_log_with_card_count(path, catalog.len())
}

pub fn write_draft_log(path: impl AsRef<Path>, drafts: &[Draft]) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    for draft in drafts {
        writeln!(out, "{}", draft.to_json_line()).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}
