use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::preference::CardId;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CardCatalog {
    names: Vec<String>,
    by_name: HashMap<String, CardId>,
}

/// Identifies a catalog: card count plus SHA-256 over the names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogFingerprint {
    pub card_count: usize,
    pub names_sha256: String,
}

impl CardCatalog {
    pub fn from_names(names: Vec<String>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::Catalog("catalog is empty".into()));
        }
        let mut by_name = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if name.trim().is_empty() {
                return Err(Error::Catalog(format!("card {i} has an empty name")));
            }
            if by_name.insert(name.clone(), CardId(i as u32)).is_some() {
                return Err(Error::Catalog(format!("duplicate card name {name:?}")));
            }
        }
        Ok(CardCatalog { names, by_name })
    }

    /// Placeholder catalog `card_000 .. card_{V-1}` used by the synthetic generator.
    pub fn synthetic(card_count: usize) -> Self {
        let width = card_count.saturating_sub(1).to_string().len().max(3);
        let names = (0..card_count)
            .map(|i| format!("card_{i:0width$}"))
            .collect();
        CardCatalog::from_names(names).expect("synthetic names are unique")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, card: CardId) -> Option<&str> {
        self.names.get(card.index()).map(String::as_str)
    }

    pub fn id(&self, name: &str) -> Option<CardId> {
        self.by_name.get(name).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (CardId, &str)> {
        self.names
            .iter()
            .enumerate()
            .map(|(i, n)| (CardId(i as u32), n.as_str()))
    }

    pub fn fingerprint(&self) -> CatalogFingerprint {
        let mut hasher = Sha256::new();
        for name in &self.names {
            hasher.update(name.as_bytes());
            hasher.update(b"\n");
        }
        let digest = hasher.finalize();
        CatalogFingerprint {
            card_count: self.names.len(),
            names_sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        }
    }

    pub fn to_csv_string(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["card_id", "name"]).expect("in-memory write");
        for (id, name) in self.entries() {
            w.write_record([id.to_string().as_str(), name])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }

    pub fn parse_csv(text: &str, origin: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| Error::format(origin, e.to_string()))?
            .clone();
        if headers.iter().collect::<Vec<_>>() != ["card_id", "name"] {
            return Err(Error::format(origin, "header must be `card_id,name`"));
        }
        let mut names = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::format(origin, e.to_string()))?;
            let line = row + 2;
            if record.len() != 2 {
                return Err(Error::format(origin, format!("line {line}: expected 2 fields")));
            }
            let id: usize = record[0]
                .trim()
                .parse()
                .map_err(|_| Error::format(origin, format!("line {line}: bad card id {:?}", &record[0])))?;
            if id < names.len() {
                return Err(Error::format(origin, format!("line {line}: duplicate card id {id}")));
            }
            if id > names.len() {
                return Err(Error::format(
                    origin,
                    format!("line {line}: card id {id} leaves a gap (expected {})", names.len()),
                ));
            }
            names.push(record[1].to_string());
        }
        if names.is_empty() {
            return Err(Error::format(origin, "catalog contains no cards"));
        }
        CardCatalog::from_names(names).map_err(|e| Error::format(origin, e.to_string()))
    }
}

pub fn load_catalog(path: impl AsRef<Path>) -> Result<CardCatalog> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    CardCatalog::parse_csv(&text, &path.display().to_string())
}
