use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;

use super::checkpoint::{Checkpoint, FORMAT_VERSION};
use super::config::TrainConfig;
use crate::draft::{generate_triples, CatalogFingerprint, Draft};
use crate::error::{Error, Result};
use crate::eval::score_decision;
use crate::nn::{AdamState, Mlp};
use crate::preference::{
    batch_gradient, BatchObjective, CardId, DropoutKey, PoolVector, PreferenceModel, PreferenceTriple,
};
use crate::rng;

/// Training triples grouped by draft; epochs shuffle the groups, then flatten.
#[derive(Debug, Clone, Default)]
pub struct TrainingData {
    pub groups: Vec<Vec<PreferenceTriple>>,
}

impl TrainingData {
    pub fn from_drafts(drafts: &[Draft], card_count: usize) -> Self {
        TrainingData {
            groups: drafts.iter().map(|d| generate_triples(d, card_count)).collect(),
        }
    }

    pub fn from_triples(triples: Vec<PreferenceTriple>) -> Self {
        TrainingData {
            groups: vec![triples],
        }
    }

    pub fn len(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn epoch_order(&self, shuffle_seed: u64, epoch: u64) -> Vec<&PreferenceTriple> {
        let mut order: Vec<usize> = (0..self.groups.len()).collect();
        order.shuffle(&mut rng::stream(shuffle_seed, &[rng::SHUFFLE, epoch]));
        order.into_iter().flat_map(|g| self.groups[g].iter()).collect()
    }
}

/// A held-out decision used to track accuracy during training.
#[derive(Debug, Clone)]
pub struct ProbePick {
    pub pool: Arc<PoolVector>,
    pub pack: Vec<CardId>,
    pub picked: CardId,
}

/// The first `limit` decisions of `drafts` (all when `limit` is `None`).
pub fn probe_picks(drafts: &[Draft], card_count: usize, limit: Option<usize>) -> Vec<ProbePick> {
    let all = drafts.iter().flat_map(|d| {
        d.decisions(card_count).into_iter().map(|x| ProbePick {
            pool: x.pool,
            pack: x.pack.to_vec(),
            picked: x.picked,
        })
    });
    match limit {
        Some(n) => all.take(n).collect(),
        None => all.collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainLogRecord {
    /// Global 1-based update index.
    pub batch: u64,
    pub loss: f64,
    /// Percent top-one accuracy on the probe picks, if any were given.
    pub probe_mtta: Option<f64>,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub checkpoint: Checkpoint,
    pub log: Vec<TrainLogRecord>,
    /// Mean loss of every update in order.
    pub losses: Vec<f64>,
}

fn probe_mtta(model: &PreferenceModel, probe: &[ProbePick]) -> Result<Option<f64>> {
    if probe.is_empty() {
        return Ok(None);
    }
    let mut hits = 0usize;
    for pick in probe {
        if score_decision(model, &pick.pool, &pick.pack, pick.picked)?.0 {
            hits += 1;
        }
    }
    Ok(Some(100.0 * hits as f64 / probe.len() as f64))
}

/// Train from freshly initialized parameters for `config.epochs` epochs.
pub fn train(
    config: &TrainConfig,
    catalog: CatalogFingerprint,
    data: &TrainingData,
    probe: &[ProbePick],
) -> Result<TrainOutcome> {
    config.validate()?;
    if catalog.card_count != config.mlp.input_dim {
        return Err(Error::Config(format!(
            "network input_dim {} does not match the catalog's {} cards",
            config.mlp.input_dim, catalog.card_count
        )));
    }
    let net = Mlp::new(config.mlp.clone())?;
    let adam = AdamState::new(config.adam(), net.params());
    let mut start = Checkpoint {
        format_version: FORMAT_VERSION,
        config: config.clone(),
        params: net.params().clone(),
        adam,
        epoch: 0,
        batch: 0,
        rng_cursor: 0,
        catalog,
    };
    start.config.epochs = 0;
    run(start, config.epochs as u64, data, probe)
}

/// Continue a checkpoint for `extra_epochs` more epochs.
pub fn resume(checkpoint: Checkpoint, extra_epochs: usize, data: &TrainingData, probe: &[ProbePick]) -> Result<TrainOutcome> {
    checkpoint.config.validate()?;
    let target = checkpoint.config.epochs as u64 + extra_epochs as u64;
    run(checkpoint, target, data, probe)
}

fn run(mut ckpt: Checkpoint, target_epochs: u64, data: &TrainingData, probe: &[ProbePick]) -> Result<TrainOutcome> {
    if data.is_empty() {
        return Err(Error::Usage("no training triples".into()));
    }
    let config = ckpt.config.clone();
    if let Some(t) = data.groups.iter().flatten().next() {
        if t.anchor.dim() != config.mlp.input_dim {
            return Err(Error::Config(format!(
                "training data encodes {} cards, network expects {}",
                t.anchor.dim(),
                config.mlp.input_dim
            )));
        }
    }
    let objective = match config.head {
        crate::preference::Head::Cpr => BatchObjective::Cpr { margin: config.margin },
        crate::preference::Head::Ranknet => BatchObjective::Ranknet,
    };
    let mut net = Mlp::from_parts(config.mlp.clone(), ckpt.params.clone())?;
    let started = Instant::now();
    let mut log = Vec::new();
    let mut losses = Vec::new();

    while ckpt.epoch < target_epochs {
        let order = data.epoch_order(config.shuffle_seed, ckpt.epoch);
        let batches: Vec<&[&PreferenceTriple]> = order.chunks(config.batch_size).collect();
        let last_epoch = ckpt.epoch + 1 == target_epochs;
        for (b, chunk) in batches.iter().enumerate().skip(ckpt.batch as usize) {
            let batch: Vec<PreferenceTriple> = chunk.iter().map(|t| (*t).clone()).collect();
            let key = DropoutKey {
                seed: config.mlp.seed,
                update: ckpt.rng_cursor,
            };
            let (loss, grads) = batch_gradient(&net, objective, &batch, Some(key))?;
            ckpt.adam.step(net.params_mut(), &grads)?;
            ckpt.rng_cursor += 1;
            ckpt.batch += 1;
            losses.push(loss);

            let final_update = last_epoch && b + 1 == batches.len();
            if ckpt.rng_cursor.is_multiple_of(config.eval_every as u64) || final_update {
                let model = PreferenceModel::new(config.head, net.clone())?;
                log.push(TrainLogRecord {
                    batch: ckpt.rng_cursor,
                    loss,
                    probe_mtta: probe_mtta(&model, probe)?,
                    seconds: started.elapsed().as_secs_f64(),
                });
            }
        }
        ckpt.epoch += 1;
        ckpt.batch = 0;
        ckpt.config.epochs = ckpt.epoch as usize;
    }
    ckpt.params = net.params().clone();
    Ok(TrainOutcome {
        checkpoint: ckpt,
        log,
        losses,
    })
}

pub fn write_log_csv(path: impl AsRef<Path>, log: &[TrainLogRecord]) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("batch,loss,probe_mtta,seconds\n");
    for r in log {
        let probe = r.probe_mtta.map(|v| format!("{v:.4}")).unwrap_or_default();
        out.push_str(&format!("{},{},{},{:.3}\n", r.batch, r.loss, probe, r.seconds));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
