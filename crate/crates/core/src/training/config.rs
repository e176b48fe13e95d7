use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{AdamConfig, MlpConfig};
use crate::preference::Head;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub head: Head,
    pub mlp: MlpConfig,
    pub margin: f64,
    pub lr: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub shuffle_seed: u64,
    /// Log (and probe) every this many updates.
    pub eval_every: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

pub const DESK_CPR_DIM: usize = 16;

impl TrainConfig {
    /// lr 1e-4, batch 128, margin 1, dropout 0.5, three hidden layers of 512,
    /// one epoch. CPR embeds into 16 dimensions, RankNet into 1.
    pub fn new(head: Head, card_count: usize) -> Self {
        let output_dim = match head {
            Head::Cpr => DESK_CPR_DIM,
            Head::Ranknet => 1,
        };
        let adam = AdamConfig::default();
        TrainConfig {
            head,
            mlp: MlpConfig::new(card_count, output_dim),
            margin: 1.0,
            lr: adam.lr,
            batch_size: 128,
            epochs: 1,
            shuffle_seed: 0,
            eval_every: 1000,
            beta1: adam.beta1,
            beta2: adam.beta2,
            epsilon: adam.epsilon,
        }
    }

    /// Named presets: `cpr-d2`, `cpr-d16`, `cpr-d256`, `ranknet` use the
    /// full network; `desk-cpr` (D=16) and `desk-ranknet` use two hidden
    /// layers of 128 without dropout so one epoch over a few thousand drafts
    /// fits on a single core.
    pub fn preset(name: &str, card_count: usize) -> Result<Self> {
        let (head, dim, desk) = match name {
            "cpr-d2" => (Head::Cpr, 2, false),
            "cpr-d16" => (Head::Cpr, 16, false),
            "cpr-d256" => (Head::Cpr, 256, false),
            "ranknet" => (Head::Ranknet, 1, false),
            "desk-cpr" => (Head::Cpr, DESK_CPR_DIM, true),
            "desk-ranknet" => (Head::Ranknet, 1, true),
            other => return Err(Error::Config(format!("unknown preset {other:?}"))),
        };
        let mut config = TrainConfig::new(head, card_count);
        config.mlp.output_dim = dim;
        if desk {
            config.mlp.hidden_dims = vec![128, 128];
            config.mlp.dropout_p = 0.0;
        }
        Ok(config)
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            lr: self.lr,
            beta1: self.beta1,
            beta2: self.beta2,
            epsilon: self.epsilon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.mlp.validate()?;
        if self.head == Head::Ranknet && self.mlp.output_dim != 1 {
            return Err(Error::Config(format!(
                "ranknet head requires output_dim = 1, got {}",
                self.mlp.output_dim
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be positive".into()));
        }
        if self.eval_every == 0 {
            return Err(Error::Config("eval_every must be positive".into()));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::Config(format!("lr must be positive, got {}", self.lr)));
        }
        if !(self.margin >= 0.0 && self.margin.is_finite()) {
            return Err(Error::Config(format!("margin must be >= 0, got {}", self.margin)));
        }
        if !((0.0..1.0).contains(&self.beta1) && (0.0..1.0).contains(&self.beta2) && self.epsilon > 0.0) {
            return Err(Error::Config("invalid Adam parameters".into()));
        }
        Ok(())
    }

    /// Set one field from its `key=value` spelling.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let bad = |what: &str| Error::Config(format!("invalid value {value:?} for {what}"));
        macro_rules! parse {
            ($what:expr) => {
                value.parse().map_err(|_| bad($what))?
            };
        }
        match key.trim() {
            "head" => self.head = value.parse()?,
            "input_dim" => self.mlp.input_dim = parse!("input_dim"),
            "hidden_dims" => {
                self.mlp.hidden_dims = value
                    .split(',')
                    .map(|v| v.trim().parse().map_err(|_| bad("hidden_dims")))
                    .collect::<Result<Vec<usize>>>()?
            }
            "output_dim" => self.mlp.output_dim = parse!("output_dim"),
            "dropout" | "dropout_p" => self.mlp.dropout_p = parse!("dropout"),
            "seed" => self.mlp.seed = parse!("seed"),
            "margin" => self.margin = parse!("margin"),
            "lr" => self.lr = parse!("lr"),
            "batch_size" => self.batch_size = parse!("batch_size"),
            "epochs" => self.epochs = parse!("epochs"),
            "shuffle_seed" => self.shuffle_seed = parse!("shuffle_seed"),
            "eval_every" => self.eval_every = parse!("eval_every"),
            "beta1" => self.beta1 = parse!("beta1"),
            "beta2" => self.beta2 = parse!("beta2"),
            "epsilon" => self.epsilon = parse!("epsilon"),
            other => return Err(Error::Config(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Apply a flat `key=value` document (`#` starts a comment).
    pub fn apply_kv(&mut self, text: &str) -> Result<()> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", no + 1)))?;
            self.set(key, value)
                .map_err(|e| Error::Config(format!("line {}: {e}", no + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.apply_kv(&text)
    }

    pub fn to_kv(&self) -> String {
        let hidden: Vec<String> = self.mlp.hidden_dims.iter().map(usize::to_string).collect();
        format!(
            "head={}\ninput_dim={}\nhidden_dims={}\noutput_dim={}\ndropout={}\nseed={}\nmargin={}\nlr={}\n\
             batch_size={}\nepochs={}\nshuffle_seed={}\neval_every={}\nbeta1={}\nbeta2={}\nepsilon={}\n",
            self.head,
            self.mlp.input_dim,
            hidden.join(","),
            self.mlp.output_dim,
            self.mlp.dropout_p,
            self.mlp.seed,
            self.margin,
            self.lr,
            self.batch_size,
            self.epochs,
            self.shuffle_seed,
            self.eval_every,
            self.beta1,
            self.beta2,
            self.epsilon
        )
    }
}
