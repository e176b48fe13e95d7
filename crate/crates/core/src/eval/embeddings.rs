use std::path::Path;

use crate::draft::{CardCatalog, CardStats};
use crate::error::{Error, Result};
use crate::preference::{euclidean_distance, CardId, Head, PoolVector, PreferenceModel};

use super::kendall::kendall_tau;

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingRow {
    pub card: CardId,
    pub name: String,
    pub first_pick_rate: Option<f64>,
    pub dist_to_empty: f64,
    pub embedding: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingExport {
    pub rows: Vec<EmbeddingRow>,
    /// Tau-b between first-pick rate and negated distance to the empty
    /// anchor, over cards that were offered as a first pick.
    pub tau: Option<f64>,
}

impl EmbeddingExport {
    /// Tau-b between `values[card]` and the negated distance to the empty anchor.
    pub fn tau_against(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.rows.len() {
            return Err(Error::Shape(format!(
                "{} values for {} cards",
                values.len(),
                self.rows.len()
            )));
        }
        let neg: Vec<f64> = self.rows.iter().map(|r| -r.dist_to_empty).collect();
        kendall_tau(values, &neg)
    }
}

pub fn export_embeddings(model: &PreferenceModel, catalog: &CardCatalog, stats: &CardStats) -> Result<EmbeddingExport> {
    if model.head() != Head::Cpr {
        return Err(Error::Usage("embedding export needs a cpr model".into()));
    }
    if model.card_count() != catalog.len() {
        return Err(Error::Compatibility(format!(
            "model expects {} cards, catalog has {}",
            model.card_count(),
            catalog.len()
        )));
    }
    let empty = model.embed_pool(&PoolVector::empty(catalog.len()))?;
    let rows = catalog
        .entries()
        .map(|(card, name)| {
            let e = model.embed_card(card)?;
            Ok(EmbeddingRow {
                card,
                name: name.to_string(),
                first_pick_rate: stats.cards.get(card.index()).and_then(|c| c.first_pick_rate()),
                dist_to_empty: euclidean_distance(empty.values(), e.values())?,
                embedding: e.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (fpr, neg): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter_map(|r| r.first_pick_rate.map(|f| (f, -r.dist_to_empty)))
        .unzip();
    let tau = if fpr.len() >= 2 { Some(kendall_tau(&fpr, &neg)?) } else { None };
    Ok(EmbeddingExport { rows, tau })
}

/// CSV `card_id,name,first_pick_rate,dist_to_empty,e0,...`; a card never
/// offered as first pick gets rate 0.
pub fn write_embeddings_csv(path: impl AsRef<Path>, export: &EmbeddingExport) -> Result<()> {
    let path = path.as_ref();
    let dim = export.rows.first().map_or(0, |r| r.embedding.len());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["card_id".to_string(), "name".into(), "first_pick_rate".into(), "dist_to_empty".into()];
    header.extend((0..dim).map(|i| format!("e{i}")));
    w.write_record(&header).expect("in-memory write");
    for r in &export.rows {
        let mut rec = vec![
            r.card.to_string(),
            r.name.clone(),
            format!("{:.6}", r.first_pick_rate.unwrap_or(0.0)),
            r.dist_to_empty.to_string(),
        ];
        rec.extend(r.embedding.iter().map(f64::to_string));
        w.write_record(&rec).expect("in-memory write");
    }
    let bytes = w.into_inner().expect("in-memory flush");
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::draft::{compute_stats, synth_drafts, PlantedOracle};
    use crate::nn::{Mlp, MlpConfig, MlpParams};

    #[test]
    fn identical_embeddings_give_zero_tau() {
        let catalog = CardCatalog::synthetic(20);
        let config = MlpConfig::new(20, 3).with_hidden(vec![4]);
        let mut params = MlpParams::zeros_for(&config);
        params.layers[1].biases = vec![0.3, -0.2, 0.1];
        let model = PreferenceModel::new(Head::Cpr, Mlp::from_parts(config, params).unwrap()).unwrap();
        let oracle = PlantedOracle::random(20, 0.1, 1);
        let stats = compute_stats(&synth_drafts(3, &oracle, 0.3, 1).unwrap(), 20).unwrap();
        let export = export_embeddings(&model, &catalog, &stats).unwrap();
        assert_eq!(export.rows.len(), 20);
        let d0 = export.rows[0].dist_to_empty;
        assert!(export.rows.iter().all(|r| r.dist_to_empty == d0));
        assert_eq!(export.tau, Some(0.0));
    }

    #[test]
    fn ranknet_is_rejected() {
        let catalog = CardCatalog::synthetic(20);
        let net = Mlp::new(MlpConfig::new(20, 1).with_hidden(vec![4])).unwrap();
        let model = PreferenceModel::new(Head::Ranknet, net).unwrap();
        let stats = CardStats { cards: vec![Default::default(); 20] };
        assert!(matches!(export_embeddings(&model, &catalog, &stats), Err(Error::Usage(_))));
    }
}
