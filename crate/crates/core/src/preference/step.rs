use rayon::prelude::*;

use super::encoding::CardOneHot;
use super::loss::{ranknet_loss, triplet_loss};
use super::PreferenceTriple;
use crate::error::{Error, Result};
use crate::nn::{AdamState, Mlp, MlpParams, Mode, Objective};
use crate::rng::{self, Stream};

/// Examples per partial gradient sum. Partial sums are added in chunk order,
/// so results do not depend on how chunks are scheduled across threads.
pub const REDUCTION_CHUNK: usize = 16;

/// Addresses the dropout stream of one update; example `j` of the batch uses
/// `rng::stream(seed, [DROPOUT, update, j])`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DropoutKey {
    pub seed: u64,
    pub update: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BatchObjective {
    /// Triplet loss over (pool, positive card, negative card) embeddings.
    Cpr { margin: f64 },
    /// Cross-entropy on σ(u(C ∪ {p}) − u(C ∪ {n})).
    Ranknet,
}

fn example_gradient(
    net: &Mlp,
    objective: BatchObjective,
    triple: &PreferenceTriple,
    mut stream: Option<Stream>,
    mut grads: Option<&mut MlpParams>,
) -> Result<f64> {
    if triple.positive == triple.negative {
        return Err(Error::Input(format!(
            "triple has identical positive and negative card {}",
            triple.positive
        )));
    }
    let dim = net.input_dim();
    if triple.anchor.dim() != dim {
        return Err(Error::Shape(format!(
            "anchor encodes {} cards, network expects {dim}",
            triple.anchor.dim()
        )));
    }
    let mut pass = |input: &[f64]| match stream.as_mut() {
        Some(s) => net.forward(input, Mode::Train(s)),
        None => net.forward(input, Mode::Eval),
    };
    match objective {
        BatchObjective::Cpr { margin } => {
            let (a, cache_a) = pass(&triple.anchor.to_input())?;
            let (p, cache_p) = pass(&CardOneHot::new(triple.positive, dim)?.to_input())?;
            let (n, cache_n) = pass(&CardOneHot::new(triple.negative, dim)?.to_input())?;
            let t = triplet_loss(&a, &p, &n, margin)?;
            if let Some(grads) = grads.as_deref_mut().filter(|_| t.is_active()) {
                net.accumulate_backward(&cache_a, &t.grad_anchor, grads, false)?;
                net.accumulate_backward(&cache_p, &t.grad_positive, grads, false)?;
                net.accumulate_backward(&cache_n, &t.grad_negative, grads, false)?;
            }
            Ok(t.loss)
        }
        BatchObjective::Ranknet => {
            if net.output_dim() != 1 {
                return Err(Error::Shape(format!(
                    "RankNet needs a scalar output, network has {}",
                    net.output_dim()
                )));
            }
            let (up, cache_p) = pass(&triple.anchor.with_added(triple.positive)?.to_input())?;
            let (un, cache_n) = pass(&triple.anchor.with_added(triple.negative)?.to_input())?;
            let l = ranknet_loss(up[0], un[0])?;
            if let Some(grads) = grads {
                net.accumulate_backward(&cache_p, &[l.grad_positive], grads, false)?;
                net.accumulate_backward(&cache_n, &[l.grad_negative], grads, false)?;
            }
            Ok(l.loss)
        }
    }
}

/// Mean loss over the batch and the gradient of that mean.
///
/// `dropout = None` evaluates without dropout. The mean loss is summed in
/// sorted order, so it does not depend on the order of the batch.
pub fn batch_gradient(
    net: &Mlp,
    objective: BatchObjective,
    batch: &[PreferenceTriple],
    dropout: Option<DropoutKey>,
) -> Result<(f64, MlpParams)> {
    if batch.is_empty() {
        return Err(Error::Usage("training batch is empty".into()));
    }
    let partials: Vec<Result<(Vec<f64>, MlpParams)>> = batch
        .par_chunks(REDUCTION_CHUNK)
        .enumerate()
        .map(|(c, chunk)| {
            let mut grads = net.params().zeros_like();
            let mut losses = Vec::with_capacity(chunk.len());
            for (k, triple) in chunk.iter().enumerate() {
                let j = (c * REDUCTION_CHUNK + k) as u64;
                let stream = dropout.map(|d| rng::stream(d.seed, &[rng::DROPOUT, d.update, j]));
                losses.push(example_gradient(net, objective, triple, stream, Some(&mut grads))?);
            }
            Ok((losses, grads))
        })
        .collect();

    let mut losses = Vec::with_capacity(batch.len());
    let mut total: Option<MlpParams> = None;
    for partial in partials {
        let (l, g) = partial?;
        losses.extend(l);
        match total.as_mut() {
            Some(t) => t.add_assign(&g),
            None => total = Some(g),
        }
    }
    let mut grads = total.expect("non-empty batch");
    let scale = 1.0 / batch.len() as f64;
    grads.scale(scale);
    losses.sort_by(f64::total_cmp);
    let mean = losses.iter().sum::<f64>() * scale;
    Ok((mean, grads))
}

fn apply_step(
    net: &mut Mlp,
    objective: BatchObjective,
    batch: &[PreferenceTriple],
    adam: &mut AdamState,
    dropout: Option<DropoutKey>,
) -> Result<f64> {
    let (loss, grads) = batch_gradient(net, objective, batch, dropout)?;
    adam.step(net.params_mut(), &grads)?;
    Ok(loss)
}

/// Three passes per triple through the shared network, one Adam step on the
/// batch-mean triplet loss. Returns the mean loss before the step.
pub fn cpr_training_step(
    net: &mut Mlp,
    batch: &[PreferenceTriple],
    margin: f64,
    adam: &mut AdamState,
    dropout: Option<DropoutKey>,
) -> Result<f64> {
    apply_step(net, BatchObjective::Cpr { margin }, batch, adam, dropout)
}

/// Two passes per pair on `C ∪ {p}` and `C ∪ {n}`, one Adam step on the
/// batch-mean cross-entropy.
pub fn ranknet_training_step(
    net: &mut Mlp,
    batch: &[PreferenceTriple],
    adam: &mut AdamState,
    dropout: Option<DropoutKey>,
) -> Result<f64> {
    apply_step(net, BatchObjective::Ranknet, batch, adam, dropout)
}

/// Evaluation-mode objective over a fixed batch, for gradient checking.
pub struct EvalObjective<'a> {
    pub objective: BatchObjective,
    pub batch: &'a [PreferenceTriple],
}

impl Objective for EvalObjective<'_> {
    fn loss(&self, net: &Mlp) -> Result<f64> {
        let mut total = 0.0;
        for triple in self.batch {
            total += example_gradient(net, self.objective, triple, None, None)?;
        }
        Ok(total / self.batch.len() as f64)
    }

    fn loss_and_grad(&self, net: &Mlp) -> Result<(f64, MlpParams)> {
        batch_gradient(net, self.objective, self.batch, None)
    }
}
