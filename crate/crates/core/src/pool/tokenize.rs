//! Shared tokenizer: lowercase, split on non-alphanumeric, no stemming.

/// Splits `text` into lowercase alphanumeric tokens. Every non-alphanumeric
/// character is a separator and empty fragments are dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hyphens_and_case_fold_away() {
        assert_eq!(
            tokenize("HotpotQA-style 2-hop"),
            vec!["hotpotqa", "style", "2", "hop"]
        );
    }

    #[test]
    fn empty_string_yields_no_tokens() {
        assert!(tokenize("").is_empty());
    }

    #[test]
    fn punctuation_only_yields_no_tokens() {
        assert!(tokenize("?!,  ---").is_empty());
    }

    #[test]
    fn digits_survive_as_tokens() {
        assert_eq!(tokenize("v2.0 beta"), vec!["v2", "0", "beta"]);
    }

    #[test]
    fn non_ascii_letters_are_kept() {
        assert_eq!(tokenize("Köln café"), vec!["köln", "café"]);
    }
}
