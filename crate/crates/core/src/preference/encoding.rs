use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a card in its catalog (`0..V`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CardId(pub u32);

impl CardId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for CardId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u32> for CardId {
    fn from(v: u32) -> Self {
        CardId(v)
    }
}

pub(crate) fn check_card(card: CardId, dim: usize) -> Result<()> {
    if card.index() < dim {
        Ok(())
    } else {
        Err(Error::Catalog(format!(
            "card id {card} is outside the catalog of {dim} cards"
        )))
    }
}

/// Multiset of already chosen cards as per-card counts.
///
/// Stored sparsely (sorted `(card, count)` pairs); [`PoolVector::to_input`]
/// produces the dense network input.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PoolVector {
    dim: usize,
    entries: Vec<(CardId, u32)>,
}

impl PoolVector {
    pub fn empty(dim: usize) -> Self {
        PoolVector {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Multiset cardinality (sum of counts).
    pub fn len(&self) -> usize {
        self.entries.iter().map(|(_, n)| *n as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count(&self, card: CardId) -> u32 {
        self.entries
            .binary_search_by_key(&card, |(c, _)| *c)
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    pub fn entries(&self) -> &[(CardId, u32)] {
        &self.entries
    }

    pub fn add(&mut self, card: CardId) -> Result<()> {
        check_card(card, self.dim)?;
        match self.entries.binary_search_by_key(&card, |(c, _)| *c) {
            Ok(i) => self.entries[i].1 += 1,
            Err(i) => self.entries.insert(i, (card, 1)),
        }
        Ok(())
    }

    /// `C ∪ {card}` with the count of `card` raised by one.
    pub fn with_added(&self, card: CardId) -> Result<PoolVector> {
        let mut next = self.clone();
        next.add(card)?;
        Ok(next)
    }

    pub fn counts(&self) -> Vec<u32> {
        let mut dense = vec![0; self.dim];
        for &(c, n) in &self.entries {
            dense[c.index()] = n;
        }
        dense
    }

    pub fn to_input(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.dim];
        self.write_input(&mut dense);
        dense
    }

    pub(crate) fn write_input(&self, dense: &mut [f64]) {
        dense.iter_mut().for_each(|v| *v = 0.0);
        for &(c, n) in &self.entries {
            dense[c.index()] = f64::from(n);
        }
    }

    /// Cards of the multiset, each repeated by its count, ascending.
    pub fn cards(&self) -> Vec<CardId> {
        self.entries
            .iter()
            .flat_map(|&(c, n)| std::iter::repeat_n(c, n as usize))
            .collect()
    }
}

/// Count encoding of a multiset of cards.
pub fn encode_pool(cards: &[CardId], dim: usize) -> Result<PoolVector> {
    let mut pool = PoolVector::empty(dim);
    for &c in cards {
        pool.add(c)?;
    }
    Ok(pool)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CardOneHot {
    dim: usize,
    card: CardId,
}

impl CardOneHot {
    pub fn new(card: CardId, dim: usize) -> Result<Self> {
        check_card(card, dim)?;
        Ok(CardOneHot { dim, card })
    }

    pub fn card(&self) -> CardId {
        self.card
    }

    pub fn to_input(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.dim];
        dense[self.card.index()] = 1.0;
        dense
    }
}
