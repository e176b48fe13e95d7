use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::encoding::{CardId, CardOneHot, PoolVector};
use super::loss::euclidean_distance;
use crate::error::{Error, Result};
use crate::nn::Mlp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Head {
    Cpr,
    Ranknet,
}

impl Head {
    pub fn as_str(self) -> &'static str {
        match self {
            Head::Cpr => "cpr",
            Head::Ranknet => "ranknet",
        }
    }
}

impl std::str::FromStr for Head {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cpr" => Ok(Head::Cpr),
            "ranknet" => Ok(Head::Ranknet),
            other => Err(Error::Config(format!("unknown head {other:?} (expected cpr or ranknet)"))),
        }
    }
}

impl std::fmt::Display for Head {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Network output for a set or a card, entries in [−1, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Embedding(pub Vec<f64>);

impl Embedding {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankedCard {
    pub card: CardId,
    pub score: f64,
    pub rank: usize,
}

/// Candidates best first. CPR scores are distances (ascending), RankNet
/// scores are utilities (descending); equal scores go to the lower card id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedPack {
    pub head: Head,
    pub entries: Vec<RankedCard>,
}

impl RankedPack {
    pub fn from_scores(head: Head, pack: &[CardId], scores: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..pack.len()).collect();
        order.sort_by(|&a, &b| {
            let by_score = match head {
                Head::Cpr => scores[a].total_cmp(&scores[b]),
                Head::Ranknet => scores[b].total_cmp(&scores[a]),
            };
            by_score.then(pack[a].cmp(&pack[b]))
        });
        RankedPack {
            head,
            entries: order
                .into_iter()
                .enumerate()
                .map(|(rank, i)| RankedCard {
                    card: pack[i],
                    score: scores[i],
                    rank,
                })
                .collect(),
        }
    }

    pub fn top(&self) -> Option<CardId> {
        self.entries.first().map(|e| e.card)
    }

    /// Rank of the first occurrence of `card`.
    pub fn rank_of(&self, card: CardId) -> Option<usize> {
        self.entries.iter().find(|e| e.card == card).map(|e| e.rank)
    }

    /// Strict preference of `a` over `b` implied by the scores.
    pub fn prefers(&self, a: CardId, b: CardId) -> Option<bool> {
        let sa = self.entries.iter().find(|e| e.card == a)?.score;
        let sb = self.entries.iter().find(|e| e.card == b)?.score;
        Some(preferred(self.head, (sa, a), (sb, b)) == Ordering::Less)
    }
}

/// Ordering of two scored candidates: `Less` means the first is better.
pub(crate) fn preferred(head: Head, (sa, a): (f64, CardId), (sb, b): (f64, CardId)) -> Ordering {
    let by_score = match head {
        Head::Cpr => sa.total_cmp(&sb),
        Head::Ranknet => sb.total_cmp(&sa),
    };
    by_score.then(a.cmp(&b))
}

fn check_pack(pack: &[CardId]) -> Result<()> {
    if pack.is_empty() {
        Err(Error::Usage("cannot rank an empty pack".into()))
    } else {
        Ok(())
    }
}

fn check_dim(net: &Mlp, pool: &PoolVector) -> Result<()> {
    if pool.dim() != net.input_dim() {
        return Err(Error::Shape(format!(
            "pool encodes {} cards, network expects {}",
            pool.dim(),
            net.input_dim()
        )));
    }
    Ok(())
}

/// Evaluation-mode embedding of any input encoding.
pub fn cpr_embed(net: &Mlp, input: &[f64]) -> Result<Embedding> {
    net.infer(input).map(Embedding)
}

pub fn cpr_rank(net: &Mlp, pool: &PoolVector, pack: &[CardId]) -> Result<RankedPack> {
    check_pack(pack)?;
    check_dim(net, pool)?;
    let anchor = net.infer(&pool.to_input())?;
    let scores = pack
        .iter()
        .map(|&c| {
            let e = net.infer(&CardOneHot::new(c, net.input_dim())?.to_input())?;
            euclidean_distance(&anchor, &e)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(RankedPack::from_scores(Head::Cpr, pack, &scores))
}

pub fn ranknet_rank(net: &Mlp, pool: &PoolVector, pack: &[CardId]) -> Result<RankedPack> {
    check_pack(pack)?;
    check_dim(net, pool)?;
    if net.output_dim() != 1 {
        return Err(Error::Shape(format!(
            "RankNet needs a scalar output, network has {}",
            net.output_dim()
        )));
    }
    let scores = pack
        .iter()
        .map(|&c| Ok(net.infer(&pool.with_added(c)?.to_input())?[0]))
        .collect::<Result<Vec<f64>>>()?;
    Ok(RankedPack::from_scores(Head::Ranknet, pack, &scores))
}

/// A trained network together with the way it ranks candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceModel {
    head: Head,
    net: Mlp,
}

impl PreferenceModel {
    pub fn new(head: Head, net: Mlp) -> Result<Self> {
        if head == Head::Ranknet && net.output_dim() != 1 {
            return Err(Error::Config(format!(
                "ranknet head requires output_dim 1, got {}",
                net.output_dim()
            )));
        }
        Ok(PreferenceModel { head, net })
    }

    pub fn head(&self) -> Head {
        self.head
    }

    pub fn net(&self) -> &Mlp {
        &self.net
    }

    pub fn card_count(&self) -> usize {
        self.net.input_dim()
    }

    pub fn embed_pool(&self, pool: &PoolVector) -> Result<Embedding> {
        check_dim(&self.net, pool)?;
        cpr_embed(&self.net, &pool.to_input())
    }

    pub fn embed_card(&self, card: CardId) -> Result<Embedding> {
        cpr_embed(&self.net, &CardOneHot::new(card, self.card_count())?.to_input())
    }

    pub fn rank(&self, pool: &PoolVector, pack: &[CardId]) -> Result<RankedPack> {
        match self.head {
            Head::Cpr => cpr_rank(&self.net, pool, pack),
            Head::Ranknet => ranknet_rank(&self.net, pool, pack),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::MlpConfig;
    use crate::preference::encode_pool;

    fn ids(v: &[u32]) -> Vec<CardId> {
        v.iter().copied().map(CardId).collect()
    }

    fn cpr_net() -> Mlp {
        Mlp::new(MlpConfig::new(20, 4).with_hidden(vec![16]).with_seed(3)).unwrap()
    }

    #[test]
    fn single_card_pack() {
        let pool = encode_pool(&ids(&[1, 2]), 20).unwrap();
        let r = cpr_rank(&cpr_net(), &pool, &ids(&[7])).unwrap();
        assert_eq!(r.entries.len(), 1);
        assert_eq!((r.entries[0].card, r.entries[0].rank), (CardId(7), 0));
        let rn = Mlp::new(MlpConfig::new(20, 1).with_hidden(vec![8])).unwrap();
        let r = ranknet_rank(&rn, &pool, &ids(&[7])).unwrap();
        assert_eq!(r.top(), Some(CardId(7)));
    }

    #[test]
    fn empty_pack_is_usage_error() {
        let pool = PoolVector::empty(20);
        assert!(matches!(cpr_rank(&cpr_net(), &pool, &[]), Err(Error::Usage(_))));
    }

    #[test]
    fn ties_go_to_lower_id() {
        let r = RankedPack::from_scores(Head::Ranknet, &ids(&[9, 4, 6]), &[0.5, 0.5, 0.1]);
        assert_eq!(r.entries.iter().map(|e| e.card.0).collect::<Vec<_>>(), vec![4, 9, 6]);
        let r = RankedPack::from_scores(Head::Cpr, &ids(&[9, 4, 6]), &[0.5, 0.5, 0.1]);
        assert_eq!(r.entries.iter().map(|e| e.card.0).collect::<Vec<_>>(), vec![6, 4, 9]);
    }

    #[test]
    fn empty_anchor_and_single_card_anchor() {
        let net = cpr_net();
        let model = PreferenceModel::new(Head::Cpr, net).unwrap();
        let empty = model.embed_pool(&PoolVector::empty(20)).unwrap();
        assert_eq!(empty.dim(), 4);
        assert!(empty.values().iter().all(|v| (-1.0..=1.0).contains(v)));
        let single = model.embed_pool(&encode_pool(&ids(&[5]), 20).unwrap()).unwrap();
        assert_eq!(single, model.embed_card(CardId(5)).unwrap());
    }

    #[test]
    fn ranknet_requires_scalar_output() {
        assert!(PreferenceModel::new(Head::Ranknet, cpr_net()).is_err());
        assert!(ranknet_rank(&cpr_net(), &PoolVector::empty(20), &ids(&[1])).is_err());
    }

    #[test]
    fn head_parsing() {
        assert_eq!("CPR".parse::<Head>().unwrap(), Head::Cpr);
        assert_eq!("ranknet".parse::<Head>().unwrap(), Head::Ranknet);
        assert!("twin".parse::<Head>().is_err());
    }
}
