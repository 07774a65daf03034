//! Reciprocal rank fusion over ranked lists.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::pool::{RankedList, StrategyId};

/// Fuses two or more ranked lists: each document scores the sum over lists
/// of `1 / (k_rrf + rank)`, counting only lists that contain it. Ties break
/// by ascending document id and the fused hits carry `hybrid_rrf`.
pub fn fuse_rrf(lists: &[RankedList], k_rrf: u32, k: usize) -> Result<RankedList> {
    if lists.len() < 2 {
        return Err(Error::TooFewLists(lists.len()));
    }
    if k_rrf < 1 {
        return Err(Error::Invalid(format!("rrf constant must be >= 1, got {k_rrf}")));
    }
    if k < 1 {
        return Err(Error::InvalidK);
    }
    let mut scores: HashMap<&str, f64> = HashMap::new();
    for list in lists {
        for hit in &list.hits {
            *scores.entry(hit.doc_id.as_str()).or_insert(0.0) +=
                1.0 / (k_rrf as f64 + hit.rank as f64);
        }
    }
    let scored: Vec<(String, f64)> = scores
        .into_iter()
        .map(|(id, s)| (id.to_string(), s))
        .collect();
    Ok(RankedList::from_scored(scored, k, StrategyId::HybridRrf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pool::RankedHit;

    fn list(strategy: StrategyId, ids: &[&str]) -> RankedList {
        RankedList {
            hits: ids
                .iter()
                .enumerate()
                .map(|(i, id)| RankedHit {
                    doc_id: id.to_string(),
                    rank: i + 1,
                    score: 1.0 / (i + 1) as f64,
                    strategy,
                })
                .collect(),
        }
    }

    #[test]
    fn rank_one_in_both_lists_scores_two_over_sixty_one() {
        let fused = fuse_rrf(
            &[
                list(StrategyId::Bm25, &["d1", "d2"]),
                list(StrategyId::Dense, &["d1", "d3"]),
            ],
            60,
            10,
        )
        .unwrap();
        assert_eq!(fused.hits[0].doc_id, "d1");
        assert!((fused.hits[0].score - 2.0 / 61.0).abs() < 1e-12);
        assert!((fused.hits[0].score - 0.032787).abs() < 1e-6);
    }

    #[test]
    fn single_list_membership_scores_one_over_sixty_one() {
        let fused = fuse_rrf(
            &[
                list(StrategyId::Bm25, &["d9"]),
                list(StrategyId::Dense, &["d1"]),
            ],
            60,
            10,
        )
        .unwrap();
        let d9 = fused.hits.iter().find(|h| h.doc_id == "d9").unwrap();
        assert!((d9.score - 1.0 / 61.0).abs() < 1e-12);
    }

    #[test]
    fn higher_ranked_single_appearance_beats_lower_ranked_one() {
        // Dense rank 1 scores 1/61; bm25 rank 2 scores 1/62.
        let fused = fuse_rrf(
            &[
                list(StrategyId::Bm25, &["other", "lexical"]),
                list(StrategyId::Dense, &["dense"]),
            ],
            60,
            10,
        )
        .unwrap();
        let pos = |id: &str| fused.hits.iter().position(|h| h.doc_id == id).unwrap();
        assert!(pos("dense") < pos("lexical"));
    }

    #[test]
    fn empty_input_lists_fuse_to_empty() {
        let fused = fuse_rrf(
            &[
                RankedList::default(),
                RankedList::default(),
            ],
            60,
            10,
        )
        .unwrap();
        assert!(fused.hits.is_empty());
    }

    #[test]
    fn fewer_than_two_lists_is_an_error() {
        let one = [list(StrategyId::Bm25, &["d1"])];
        assert!(matches!(fuse_rrf(&one, 60, 10), Err(Error::TooFewLists(1))));
        assert!(matches!(fuse_rrf(&[], 60, 10), Err(Error::TooFewLists(0))));
    }

    #[test]
    fn equal_scores_break_ties_by_ascending_doc_id() {
        // Both docs appear only at rank 1 of one list each.
        let fused = fuse_rrf(
            &[
                list(StrategyId::Bm25, &["zeta"]),
                list(StrategyId::Dense, &["alpha"]),
            ],
            60,
            10,
        )
        .unwrap();
        assert_eq!(fused.hits[0].doc_id, "alpha");
        assert_eq!(fused.hits[1].doc_id, "zeta");
        assert_eq!(fused.hits[0].score, fused.hits[1].score);
    }
}
