#![allow(dead_code)]

use draftrank::draft::{CardCatalog, Draft, PlantedOracle};
use draftrank::nn::{AdamState, Mlp};
use draftrank::preference::Head;
use draftrank::training::{Checkpoint, TrainConfig, FORMAT_VERSION};

/// Freshly initialized checkpoint for `catalog`.
pub fn fresh_checkpoint(head: Head, catalog: &CardCatalog, hidden: Vec<usize>, dim: usize, seed: u64) -> Checkpoint {
    let mut config = TrainConfig::new(head, catalog.len());
    config.mlp.hidden_dims = hidden;
    config.mlp.output_dim = dim;
    config.mlp.seed = seed;
    config.epochs = 0;
    let net = Mlp::new(config.mlp.clone()).unwrap();
    Checkpoint {
        format_version: FORMAT_VERSION,
        adam: AdamState::new(config.adam(), net.params()),
        params: net.params().clone(),
        config,
        epoch: 0,
        batch: 0,
        rng_cursor: 0,
        catalog: catalog.fingerprint(),
    }
}

pub fn synth(n: usize, cards: usize, seed: u64) -> (PlantedOracle, Vec<Draft>) {
    let oracle = PlantedOracle::random(cards, 0.1, seed);
    let drafts = draftrank::draft::synth_drafts(n, &oracle, 0.0, seed).unwrap();
    (oracle, drafts)
}
