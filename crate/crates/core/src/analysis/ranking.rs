//! Members ordered by prototypical distance.

use std::cmp::Ordering;

use crate::error::Result;
use crate::interchange::{FeatureSet, SignatureRecord};
use crate::prototype::SemanticPrototype;

#[derive(Debug, Clone, PartialEq)]
pub struct RankingEntry {
    pub object_id: String,
    pub delta: f64,
    /// 1-based.
    pub rank: usize,
}

/// Sorts by `delta` ascending, ties by id, and assigns ranks.
fn rank(mut items: Vec<(String, f64)>) -> Vec<RankingEntry> {
    items.sort_by(|a, b| {
        a.1.partial_cmp(&b.1)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.0.cmp(&b.0))
    });
    items
        .into_iter()
        .enumerate()
        .map(|(i, (object_id, delta))| RankingEntry {
            object_id,
            delta,
            rank: i + 1,
        })
        .collect()
}

/// Ranks every object in `set` by its prototypical distance to `proto`.
/// The caller decides which objects belong to the category.
pub fn rank_members(set: &FeatureSet, proto: &SemanticPrototype) -> Result<Vec<RankingEntry>> {
    let items = set
        .objects()
        .iter()
        .map(|o| Ok((o.id.clone(), proto.prototypical_distance(&o.features)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(rank(items))
}

/// Same ranking, with `δ` recovered from the difference half of each signature.
pub fn rank_signatures(records: &[SignatureRecord]) -> Vec<RankingEntry> {
    rank(
        records
            .iter()
            .map(|r| (r.id.clone(), r.signature.recover_prototypical_distance()))
            .collect(),
    )
}

pub fn closest(ranking: &[RankingEntry], k: usize) -> &[RankingEntry] {
    &ranking[..k.min(ranking.len())]
}

pub fn farthest(ranking: &[RankingEntry], k: usize) -> &[RankingEntry] {
    &ranking[ranking.len() - k.min(ranking.len())..]
}

/// The closest `k` followed by the farthest `k`, without repeating entries
/// when the two views overlap.
pub fn closest_and_farthest(ranking: &[RankingEntry], k: usize) -> Vec<&RankingEntry> {
    let head = closest(ranking, k);
    let tail_start = (ranking.len() - k.min(ranking.len())).max(head.len());
    head.iter().chain(&ranking[tail_start..]).collect()
}
