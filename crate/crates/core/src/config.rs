//! Tunable parameters shared by the retriever pool, the scene analyzer and
//! the router.
//!
//! The shipped defaults live in `default.conf` next to this module and are
//! embedded into the library. A user file only needs the keys it overrides.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Text of the configuration shipped with the library.
pub const DEFAULT_CONFIG_TEXT: &str = include_str!("default.conf");

/// Environment variable consulted when no config path is given explicitly.
pub const CONFIG_ENV_VAR: &str = "EXPRAG_CONFIG";

/// Parsed configuration. Field names match the file keys.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub config_version: u32,
    // retrieval
    pub bm25_k1: f64,
    pub bm25_b: f64,
    pub rrf_k: u32,
    pub fetch_depth: usize,
    pub embed_dim: usize,
    // routing
    pub knn_k: usize,
    pub adaptive_threshold: f64,
    // question complexity weights
    pub weight_multi_hop: f64,
    pub weight_comparison: f64,
    pub weight_conjunction: f64,
    pub weight_length: f64,
    pub weight_history: f64,
    // cue patterns (raw; the scene analyzer compiles them)
    pub multi_hop_cues: Vec<String>,
    pub comparison_cues: Vec<String>,
    pub conjunctions: Vec<String>,
    // word lists
    pub stopwords: Vec<String>,
    pub wh_words: Vec<String>,
    pub aux_words: Vec<String>,
    pub style_verbs: Vec<String>,
}

impl Default for Config {
    fn default() -> Self {
        Config::builtin()
    }
}

impl Config {
    /// The shipped defaults, with every key assigned by `default.conf`.
    fn builtin() -> Config {
        let mut cfg = Config {
            config_version: 0,
            bm25_k1: 0.0,
            bm25_b: 0.0,
            rrf_k: 0,
            fetch_depth: 0,
            embed_dim: 0,
            knn_k: 0,
            adaptive_threshold: 0.0,
            weight_multi_hop: 0.0,
            weight_comparison: 0.0,
            weight_conjunction: 0.0,
            weight_length: 0.0,
            weight_history: 0.0,
            multi_hop_cues: Vec::new(),
            comparison_cues: Vec::new(),
            conjunctions: Vec::new(),
            stopwords: Vec::new(),
            wh_words: Vec::new(),
            aux_words: Vec::new(),
            style_verbs: Vec::new(),
        };
        cfg.apply(DEFAULT_CONFIG_TEXT)
            .expect("embedded default config is valid");
        cfg
    }

    /// Parses `text` as overrides on top of the shipped defaults.
    pub fn parse(text: &str) -> Result<Config> {
        let mut cfg = Config::builtin();
        cfg.apply(text)?;
        Ok(cfg)
    }

    /// Reads a config file and applies it on top of the defaults.
    pub fn load(path: &Path) -> Result<Config> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Config::parse(&text)
    }

    /// Resolves the config from an explicit path, else `$EXPRAG_CONFIG`,
    /// else the shipped defaults.
    pub fn resolve(explicit: Option<&Path>) -> Result<Config> {
        if let Some(path) = explicit {
            return Config::load(path);
        }
        if let Ok(path) = std::env::var(CONFIG_ENV_VAR) {
            if !path.is_empty() {
                return Config::load(Path::new(&path));
            }
        }
        Ok(Config::default())
    }

    fn apply(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "line {}: expected `key = value`, got {:?}",
                    lineno + 1,
                    line
                )));
            };
            let key = key.trim();
            let value = value.trim();
            self.set(key, value)
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
            value
                .parse()
                .map_err(|_| format!("invalid value {value:?} for {key}"))
        }
        fn list(value: &str) -> Vec<String> {
            value
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect()
        }
        match key {
            "config_version" => self.config_version = num(key, value)?,
            "bm25_k1" => self.bm25_k1 = num(key, value)?,
            "bm25_b" => self.bm25_b = num(key, value)?,
            "rrf_k" => self.rrf_k = num(key, value)?,
            "fetch_depth" => self.fetch_depth = num(key, value)?,
            "embed_dim" => self.embed_dim = num(key, value)?,
            "knn_k" => self.knn_k = num(key, value)?,
            "adaptive_threshold" => self.adaptive_threshold = num(key, value)?,
            "weight_multi_hop" => self.weight_multi_hop = num(key, value)?,
            "weight_comparison" => self.weight_comparison = num(key, value)?,
            "weight_conjunction" => self.weight_conjunction = num(key, value)?,
            "weight_length" => self.weight_length = num(key, value)?,
            "weight_history" => self.weight_history = num(key, value)?,
            "multi_hop_cues" => self.multi_hop_cues = list(value),
            "comparison_cues" => self.comparison_cues = list(value),
            "conjunctions" => self.conjunctions = list(value),
            "stopwords" => self.stopwords = list(value),
            "wh_words" => self.wh_words = list(value),
            "aux_words" => self.aux_words = list(value),
            "style_verbs" => self.style_verbs = list(value),
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_parse_and_pin_core_values() {
        let cfg = Config::default();
        assert_eq!(cfg.config_version, 1);
        assert_eq!(cfg.bm25_k1, 1.2);
        assert_eq!(cfg.bm25_b, 0.75);
        assert_eq!(cfg.rrf_k, 60);
        assert_eq!(cfg.fetch_depth, 100);
        assert_eq!(cfg.embed_dim, 256);
        assert_eq!(cfg.knn_k, 5);
        assert_eq!(cfg.adaptive_threshold, 0.4);
    }

    #[test]
    fn stopword_list_has_exactly_fifty_entries() {
        let cfg = Config::default();
        assert_eq!(cfg.stopwords.len(), 50);
        let mut sorted = cfg.stopwords.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 50, "stopword list contains duplicates");
    }

    #[test]
    fn user_file_overrides_only_named_keys() {
        let cfg = Config::parse("knn_k = 9\nadaptive_threshold = 0.25\n").unwrap();
        assert_eq!(cfg.knn_k, 9);
        assert_eq!(cfg.adaptive_threshold, 0.25);
        assert_eq!(cfg.rrf_k, 60);
        assert_eq!(cfg.stopwords.len(), 50);
    }

    #[test]
    fn unknown_key_is_rejected() {
        let err = Config::parse("no_such_key = 1\n").unwrap_err();
        assert!(err.to_string().contains("no_such_key"));
    }

    #[test]
    fn missing_equals_is_rejected() {
        assert!(Config::parse("just some words\n").is_err());
    }

    #[test]
    fn comments_and_blanks_are_ignored() {
        let cfg = Config::parse("# comment\n\n  \nknn_k = 3\n").unwrap();
        assert_eq!(cfg.knn_k, 3);
    }
}
