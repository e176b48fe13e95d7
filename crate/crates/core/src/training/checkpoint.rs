//! Versioned JSON checkpoints (`*.cpr.json`).
//!
//! Floats are written in shortest round-trip form and parsed with exact
//! rounding, so `load(save(x)) == x` bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::TrainConfig;
use crate::draft::{CardCatalog, CatalogFingerprint};
use crate::error::{Error, Result};
use crate::nn::{AdamState, Mlp, MlpParams};
use crate::preference::PreferenceModel;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format_version: u32,
    pub config: TrainConfig,
    pub params: MlpParams,
    pub adam: AdamState,
    /// Completed epochs.
    pub epoch: u64,
    /// Updates already applied within `epoch` (0 at an epoch boundary).
    pub batch: u64,
    /// Total updates so far; keys the dropout streams of the next update.
    pub rng_cursor: u64,
    pub catalog: CatalogFingerprint,
}

impl Checkpoint {
    pub fn model(&self) -> Result<PreferenceModel> {
        let net = Mlp::from_parts(self.config.mlp.clone(), self.params.clone())?;
        PreferenceModel::new(self.config.head, net)
    }

    pub fn check_catalog(&self, catalog: &CardCatalog) -> Result<()> {
        let fp = catalog.fingerprint();
        if fp != self.catalog {
            return Err(Error::Compatibility(format!(
                "checkpoint was trained on {} cards ({}), catalog has {} cards ({})",
                self.catalog.card_count, self.catalog.names_sha256, fp.card_count, fp.names_sha256
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("checkpoint serialization cannot fail")
    }

    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::format(origin, format!("truncated or malformed checkpoint: {e}")))?;
        let version = value
            .get("format_version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| Error::format(origin, "missing format_version"))?;
        if version != u64::from(FORMAT_VERSION) {
            return Err(Error::Version {
                found: u32::try_from(version).unwrap_or(u32::MAX),
                expected: FORMAT_VERSION,
            });
        }
        let ckpt: Checkpoint = serde_json::from_value(value)
            .map_err(|e| Error::format(origin, format!("invalid checkpoint: {e}")))?;
        ckpt.config.validate()?;
        if ckpt.catalog.card_count != ckpt.config.mlp.input_dim {
            return Err(Error::format(origin, "catalog size does not match the network input"));
        }
        Mlp::from_parts(ckpt.config.mlp.clone(), ckpt.params.clone())?;
        ckpt.params.check_same_shape(&ckpt.adam.m, "optimizer first moments")?;
        ckpt.params.check_same_shape(&ckpt.adam.v, "optimizer second moments")?;
        Ok(ckpt)
    }
}

pub fn save_checkpoint(path: impl AsRef<Path>, checkpoint: &Checkpoint) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, checkpoint.to_json()).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<Checkpoint> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Checkpoint::from_json(&text, &path.display().to_string())
}

/// Load and require the checkpoint to match `catalog`.
pub fn load_checkpoint_for(path: impl AsRef<Path>, catalog: &CardCatalog) -> Result<Checkpoint> {
    let ckpt = load_checkpoint(path)?;
    ckpt.check_catalog(catalog)?;
    Ok(ckpt)
}
