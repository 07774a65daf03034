//! Deterministic query rewriting: stopword removal plus de-duplication.

use std::collections::BTreeSet;

use crate::pool::tokenize::tokenize;

/// Lowercases and tokenizes `query`, drops stopwords, removes repeated
/// tokens keeping the first occurrence, and joins with single spaces.
/// May return an empty string when every token is a stopword.
pub fn rewrite_query(query: &str, stopwords: &BTreeSet<String>) -> String {
    let mut kept: Vec<String> = Vec::new();
    for token in tokenize(query) {
        if stopwords.contains(&token) || kept.contains(&token) {
            continue;
        }
        kept.push(token);
    }
    kept.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;

    fn stopwords() -> BTreeSet<String> {
        Config::default().stopwords.into_iter().collect()
    }

    #[test]
    fn question_words_fall_away() {
        assert_eq!(
            rewrite_query("What is the capital of France?", &stopwords()),
            "capital france"
        );
    }

    #[test]
    fn all_stopword_query_rewrites_to_empty() {
        assert_eq!(rewrite_query("the the the", &stopwords()), "");
    }

    #[test]
    fn repeats_collapse_keeping_first_occurrence() {
        assert_eq!(
            rewrite_query("quantum quantum entanglement", &stopwords()),
            "quantum entanglement"
        );
    }
}
