use std::path::Path;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::draft::{CardCatalog, Draft, PICKS_PER_ROUND, ROUNDS};
use crate::error::{Error, Result};
use crate::preference::{CardId, PoolVector, PreferenceModel};
use crate::rng;
use crate::training::Checkpoint;

/// MTTA in percent, MTPD as mean 0-based rank of the human pick, and
/// top-one accuracy per (pack round, pick index).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub mtta: f64,
    pub mtpd: f64,
    pub n_picks: u64,
    pub per_pick: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Default)]
struct Tally {
    hits: [[u64; PICKS_PER_ROUND]; ROUNDS],
    picks: [[u64; PICKS_PER_ROUND]; ROUNDS],
    distance: u64,
}

impl Tally {
    fn record(&mut self, round: u8, index: u8, hit: bool, distance: usize) {
        let (r, i) = (round as usize, index as usize);
        self.picks[r][i] += 1;
        if hit {
            self.hits[r][i] += 1;
        }
        self.distance += distance as u64;
    }

    fn merge(mut self, other: &Tally) -> Tally {
        for r in 0..ROUNDS {
            for i in 0..PICKS_PER_ROUND {
                self.hits[r][i] += other.hits[r][i];
                self.picks[r][i] += other.picks[r][i];
            }
        }
        self.distance += other.distance;
        self
    }

    fn report(&self) -> EvalReport {
        let n: u64 = self.picks.iter().flatten().sum();
        let hits: u64 = self.hits.iter().flatten().sum();
        let per_pick = (0..ROUNDS)
            .map(|r| {
                (0..PICKS_PER_ROUND)
                    .map(|i| match self.picks[r][i] {
                        0 => 0.0,
                        k => self.hits[r][i] as f64 / k as f64,
                    })
                    .collect()
            })
            .collect();
        let denom = n.max(1) as f64;
        EvalReport {
            mtta: 100.0 * hits as f64 / denom,
            mtpd: self.distance as f64 / denom,
            n_picks: n,
            per_pick,
        }
    }
}

/// Whether the model's top card is the human pick, and the 0-based rank of
/// the human pick in the model's ranking.
pub fn score_decision(model: &PreferenceModel, pool: &PoolVector, pack: &[CardId], picked: CardId) -> Result<(bool, usize)> {
    let ranked = model.rank(pool, pack)?;
    let rank = ranked
        .rank_of(picked)
        .ok_or_else(|| Error::Input(format!("picked card {picked} is not in the pack")))?;
    Ok((ranked.top() == Some(picked), rank))
}

pub fn evaluate(model: &PreferenceModel, drafts: &[Draft]) -> Result<EvalReport> {
    let card_count = model.card_count();
    let tallies: Vec<Result<Tally>> = drafts
        .par_iter()
        .map(|draft| {
            let mut t = Tally::default();
            for d in draft.decisions(card_count) {
                let (hit, dist) = score_decision(model, &d.pool, d.pack, d.picked)?;
                t.record(d.pack_round, d.pick_index, hit, dist);
            }
            Ok(t)
        })
        .collect();
    let mut total = Tally::default();
    for t in tallies {
        total = total.merge(&t?);
    }
    Ok(total.report())
}

/// Evaluate a checkpoint after checking it was trained on `catalog`.
pub fn evaluate_checkpoint(checkpoint: &Checkpoint, catalog: &CardCatalog, drafts: &[Draft]) -> Result<EvalReport> {
    checkpoint.check_catalog(catalog)?;
    evaluate(&checkpoint.model()?, drafts)
}

/// Uniformly random rankings, averaged over `trials` independent passes.
pub fn random_baseline(drafts: &[Draft], seed: u64, trials: usize) -> Result<EvalReport> {
    if trials == 0 {
        return Err(Error::Usage("random baseline needs at least one trial".into()));
    }
    if drafts.is_empty() {
        return Err(Error::Usage("random baseline needs at least one draft".into()));
    }
    let mut reports = Vec::with_capacity(trials);
    for trial in 0..trials as u64 {
        let tallies: Vec<Tally> = drafts
            .par_iter()
            .enumerate()
            .map(|(d, draft)| {
                let mut s = rng::stream(seed, &[rng::BASELINE, trial, d as u64]);
                let mut t = Tally::default();
                for e in draft.players.iter().flatten() {
                    let mut order = e.pack.clone();
                    order.shuffle(&mut s);
                    let rank = order.iter().position(|&c| c == e.picked).expect("validated pick");
                    t.record(e.pack_round, e.pick_index, order[0] == e.picked, rank);
                }
                t
            })
            .collect();
        let total = tallies.iter().fold(Tally::default(), |acc, t| acc.merge(t));
        reports.push(total.report());
    }
    let k = trials as f64;
    let mut mean = reports[0].clone();
    mean.mtta = reports.iter().map(|r| r.mtta).sum::<f64>() / k;
    mean.mtpd = reports.iter().map(|r| r.mtpd).sum::<f64>() / k;
    for r in 0..ROUNDS {
        for i in 0..PICKS_PER_ROUND {
            mean.per_pick[r][i] = reports.iter().map(|x| x.per_pick[r][i]).sum::<f64>() / k;
        }
    }
    Ok(mean)
}

/// Accuracy per pick index, one series per pack round.
pub fn per_pick_curve(report: &EvalReport) -> [[f64; PICKS_PER_ROUND]; ROUNDS] {
    let mut out = [[0.0; PICKS_PER_ROUND]; ROUNDS];
    for (r, row) in report.per_pick.iter().enumerate().take(ROUNDS) {
        for (i, v) in row.iter().enumerate().take(PICKS_PER_ROUND) {
            out[r][i] = *v;
        }
    }
    out
}

/// CSV `pick_index,pack_0,pack_1,pack_2`.
pub fn write_curve_csv(path: impl AsRef<Path>, report: &EvalReport) -> Result<()> {
    let path = path.as_ref();
    let curve = per_pick_curve(report);
    let mut out = String::from("pick_index,pack_0,pack_1,pack_2\n");
    for (i, ((a, b), c)) in curve[0].iter().zip(&curve[1]).zip(&curve[2]).enumerate() {
        out.push_str(&format!("{i},{a:.6},{b:.6},{c:.6}\n"));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::draft::{synth_drafts, PlantedOracle};
    use crate::preference::RankedPack;

    #[test]
    fn forced_picks_are_hits() {
        let oracle = PlantedOracle::random(60, 0.1, 1);
        let drafts = synth_drafts(20, &oracle, 0.0, 1).unwrap();
        let report = random_baseline(&drafts, 3, 2).unwrap();
        for r in 0..ROUNDS {
            assert_eq!(report.per_pick[r][14], 1.0);
        }
        assert_eq!(report.n_picks, 20 * 360);
        assert!(report.mtta > 0.0 && report.mtta < 100.0);
    }

    #[test]
    fn third_place_contributes_distance_two() {
        let pack: Vec<CardId> = (0..15).map(CardId).collect();
        let scores: Vec<f64> = (0..15).map(|i| i as f64).collect();
        let ranked = RankedPack::from_scores(crate::preference::Head::Cpr, &pack, &scores);
        assert_eq!(ranked.rank_of(CardId(2)), Some(2));
        let mut t = Tally::default();
        t.record(0, 0, false, 2);
        assert_eq!(t.report().mtpd, 2.0);
    }

    #[test]
    fn baseline_argument_errors() {
        assert!(random_baseline(&[], 0, 1).is_err());
        let oracle = PlantedOracle::random(60, 0.1, 1);
        let drafts = synth_drafts(1, &oracle, 0.0, 1).unwrap();
        assert!(random_baseline(&drafts, 0, 0).is_err());
    }
}
