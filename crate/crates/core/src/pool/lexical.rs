//! Inverted index with Okapi BM25 scoring.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// One (document, term frequency) entry in a postings list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    pub doc: usize,
    pub tf: u32,
}

/// Term -> postings map over documents addressed by dense internal ids.
#[derive(Debug, Clone)]
pub struct LexicalIndex {
    postings: HashMap<String, Vec<Posting>>,
    doc_lengths: Vec<u32>,
    avgdl: f64,
}

impl LexicalIndex {
    /// Builds the index from already-tokenized documents. The position of
    /// each document in `token_docs` becomes its internal id.
    pub fn build(token_docs: &[Vec<String>]) -> Result<LexicalIndex> {
        if token_docs.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut postings: HashMap<String, Vec<Posting>> = HashMap::new();
        let mut doc_lengths = Vec::with_capacity(token_docs.len());
        for (doc, tokens) in token_docs.iter().enumerate() {
            doc_lengths.push(tokens.len() as u32);
            let mut tfs: HashMap<&str, u32> = HashMap::new();
            for t in tokens {
                *tfs.entry(t.as_str()).or_insert(0) += 1;
            }
            let mut terms: Vec<(&str, u32)> = tfs.into_iter().collect();
            terms.sort_unstable();
            for (term, tf) in terms {
                postings
                    .entry(term.to_string())
                    .or_default()
                    .push(Posting { doc, tf });
            }
        }
        // Documents are visited in ascending id order, so each postings list
        // is already sorted by internal id.
        let total: u64 = doc_lengths.iter().map(|&l| l as u64).sum();
        let avgdl = total as f64 / token_docs.len() as f64;
        Ok(LexicalIndex {
            postings,
            doc_lengths,
            avgdl,
        })
    }

    pub fn doc_count(&self) -> usize {
        self.doc_lengths.len()
    }

    pub fn avg_doc_length(&self) -> f64 {
        self.avgdl
    }

    pub fn vocabulary_size(&self) -> usize {
        self.postings.len()
    }

    pub fn doc_frequency(&self, term: &str) -> usize {
        self.postings.get(term).map_or(0, Vec::len)
    }

    pub fn doc_length(&self, doc: usize) -> u32 {
        self.doc_lengths[doc]
    }

    /// Okapi BM25 over the query tokens; a token occurring twice in the
    /// query contributes two summands. Returns (internal id, score) pairs
    /// for every document matching at least one token, unordered.
    ///
    /// idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5)), which is strictly
    /// positive, so matched documents always score above zero.
    pub fn bm25_scores(&self, query_tokens: &[String], k1: f64, b: f64) -> Vec<(usize, f64)> {
        let n = self.doc_count() as f64;
        let mut scores: HashMap<usize, f64> = HashMap::new();
        for term in query_tokens {
            let Some(postings) = self.postings.get(term) else {
                continue;
            };
            let df = postings.len() as f64;
            let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
            for p in postings {
                let tf = p.tf as f64;
                let len = self.doc_lengths[p.doc] as f64;
                let norm = tf + k1 * (1.0 - b + b * len / self.avgdl);
                *scores.entry(p.doc).or_insert(0.0) += idf * tf * (k1 + 1.0) / norm;
            }
        }
        scores.into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pool::tokenize::tokenize;

    fn build(texts: &[&str]) -> LexicalIndex {
        let docs: Vec<Vec<String>> = texts.iter().map(|t| tokenize(t)).collect();
        LexicalIndex::build(&docs).unwrap()
    }

    #[test]
    fn stats_match_hand_counts() {
        let idx = build(&["a", "a b"]);
        assert_eq!(idx.doc_frequency("a"), 2);
        assert_eq!(idx.doc_frequency("b"), 1);
        assert_eq!(idx.avg_doc_length(), 1.5);
        assert_eq!(idx.doc_count(), 2);
    }

    #[test]
    fn term_frequency_counts_repeats_within_a_doc() {
        let idx = build(&["a b a"]);
        assert_eq!(idx.doc_frequency("a"), 1);
        assert_eq!(idx.avg_doc_length(), 3.0);
        let scores = idx.bm25_scores(&tokenize("a"), 1.2, 0.75);
        assert_eq!(scores.len(), 1);
        // tf=2 enters the saturation term, not the document frequency.
        assert!(scores[0].1 > 0.0);
    }

    #[test]
    fn empty_corpus_is_rejected() {
        assert!(LexicalIndex::build(&[]).is_err());
    }

    #[test]
    fn single_doc_single_term_score_is_ln_four_thirds() {
        let idx = build(&["x"]);
        let scores = idx.bm25_scores(&tokenize("x"), 1.2, 0.75);
        assert_eq!(scores.len(), 1);
        let expected = (4.0f64 / 3.0).ln();
        assert!((scores[0].1 - expected).abs() < 1e-6, "{}", scores[0].1);
        assert!((scores[0].1 - 0.287682).abs() < 1e-6);
    }

    #[test]
    fn unmatched_query_scores_nothing() {
        let idx = build(&["alpha beta"]);
        assert!(idx.bm25_scores(&tokenize("gamma"), 1.2, 0.75).is_empty());
    }

    #[test]
    fn identical_documents_receive_identical_scores() {
        let idx = build(&["same text here", "same text here"]);
        let scores = idx.bm25_scores(&tokenize("same text"), 1.2, 0.75);
        assert_eq!(scores.len(), 2);
        assert_eq!(scores[0].1, scores[1].1);
    }
}
