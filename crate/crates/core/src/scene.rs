//! Turns a raw request (query text, dialogue history, metadata) into the
//! discrete scene description the router consumes.
//!
//! Explicit signals always win: a valid `task_type` metadata entry is
//! authoritative, a recognized dataset tag comes second, and text
//! heuristics only fill the gaps. All heuristics are deterministic and
//! driven by the cue lists in the config file.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::corpus::QueryRecord;
use crate::error::{Error, Result};
use crate::pool::tokenize::tokenize;

/// Length of the numeric encoding produced by [`encode_features`].
pub const FEATURE_DIM: usize = 12;

/// Scale cap for the context-length feature.
const CONTEXT_LENGTH_CAP: usize = 256;

/// What kind of retrieval problem the request poses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskType {
    Direct,
    MultiHop,
    Scientific,
    Unknown,
}

impl TaskType {
    pub fn name(self) -> &'static str {
        match self {
            TaskType::Direct => "direct",
            TaskType::MultiHop => "multi_hop",
            TaskType::Scientific => "scientific",
            TaskType::Unknown => "unknown",
        }
    }

    fn one_hot_index(self) -> usize {
        match self {
            TaskType::Direct => 0,
            TaskType::MultiHop => 1,
            TaskType::Scientific => 2,
            TaskType::Unknown => 3,
        }
    }
}

impl fmt::Display for TaskType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TaskType {
    type Err = Error;

    fn from_str(s: &str) -> Result<TaskType> {
        match s {
            "direct" => Ok(TaskType::Direct),
            "multi_hop" => Ok(TaskType::MultiHop),
            "scientific" => Ok(TaskType::Scientific),
            "unknown" => Ok(TaskType::Unknown),
            other => Err(Error::Invalid(format!("unknown task type {other:?}"))),
        }
    }
}

/// Surface form of the query text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryStyle {
    Interrogative,
    Declarative,
    Keyword,
}

impl QueryStyle {
    pub fn name(self) -> &'static str {
        match self {
            QueryStyle::Interrogative => "interrogative",
            QueryStyle::Declarative => "declarative",
            QueryStyle::Keyword => "keyword",
        }
    }

    fn one_hot_index(self) -> usize {
        match self {
            QueryStyle::Interrogative => 0,
            QueryStyle::Declarative => 1,
            QueryStyle::Keyword => 2,
        }
    }
}

impl fmt::Display for QueryStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Shape of the documents the request expects to retrieve from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocumentStructure {
    Passage,
    Structured,
    Unknown,
}

impl DocumentStructure {
    pub fn name(self) -> &'static str {
        match self {
            DocumentStructure::Passage => "passage",
            DocumentStructure::Structured => "structured",
            DocumentStructure::Unknown => "unknown",
        }
    }

    fn one_hot_index(self) -> usize {
        match self {
            DocumentStructure::Passage => 0,
            DocumentStructure::Structured => 1,
            DocumentStructure::Unknown => 2,
        }
    }
}

impl fmt::Display for DocumentStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The analyzed scene handed to the router and stored with experience
/// records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneFeatures {
    pub task_type: TaskType,
    pub domain: String,
    pub context_length: usize,
    pub question_complexity: f64,
    pub query_style: QueryStyle,
    pub document_structure: DocumentStructure,
}

/// What the caller knows when asking for retrieval: the query itself,
/// prior dialogue turns, and any task metadata. Request metadata overrides
/// metadata carried on the query record.
#[derive(Debug, Clone, Default)]
pub struct SkillRequest {
    pub query: QueryRecord,
    pub history: Vec<String>,
    pub metadata: BTreeMap<String, String>,
}

impl SkillRequest {
    pub fn from_query(query: QueryRecord) -> Self {
        SkillRequest {
            metadata: query.metadata.clone(),
            query,
            history: Vec::new(),
        }
    }

    fn meta(&self, key: &str) -> Option<&str> {
        self.metadata
            .get(key)
            .or_else(|| self.query.metadata.get(key))
            .map(String::as_str)
    }
}

/// Fixed 12-dimensional encoding: task type one-hot (4) ++ query style
/// one-hot (3) ++ document structure one-hot (3) ++ capped context length
/// scaled to [0,1] ++ question complexity.
pub fn encode_features(s: &SceneFeatures) -> [f64; FEATURE_DIM] {
    let mut v = [0.0; FEATURE_DIM];
    v[s.task_type.one_hot_index()] = 1.0;
    v[4 + s.query_style.one_hot_index()] = 1.0;
    v[7 + s.document_structure.one_hot_index()] = 1.0;
    v[10] = s.context_length.min(CONTEXT_LENGTH_CAP) as f64 / CONTEXT_LENGTH_CAP as f64;
    v[11] = s.question_complexity;
    v
}

/// One element of a cue pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
enum PatElem {
    /// Exact token.
    Lit(String),
    /// Single token ending in the given suffix (and longer than it).
    Suffix(String),
    /// One or more arbitrary tokens.
    Gap,
}

/// A token-level pattern such as `who *ed the` or `between * and`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CuePattern {
    elems: Vec<PatElem>,
    source: String,
}

impl CuePattern {
    pub fn parse(pattern: &str) -> Result<CuePattern> {
        let mut elems = Vec::new();
        for word in pattern.split_whitespace() {
            if word == "*" {
                elems.push(PatElem::Gap);
            } else if let Some(suffix) = word.strip_prefix('*') {
                elems.push(PatElem::Suffix(suffix.to_string()));
            } else {
                elems.push(PatElem::Lit(word.to_string()));
            }
        }
        if elems.iter().all(|e| matches!(e, PatElem::Gap)) {
            return Err(Error::Config(format!(
                "cue pattern {pattern:?} needs at least one literal element"
            )));
        }
        Ok(CuePattern {
            elems,
            source: pattern.to_string(),
        })
    }

    /// True when the pattern matches anywhere in the token sequence.
    pub fn matches(&self, tokens: &[String]) -> bool {
        fn rec(elems: &[PatElem], tokens: &[String]) -> bool {
            let Some(first) = elems.first() else {
                return true;
            };
            match first {
                PatElem::Lit(w) => {
                    tokens.first().map_or(false, |t| t == w) && rec(&elems[1..], &tokens[1..])
                }
                PatElem::Suffix(s) => {
                    tokens
                        .first()
                        .map_or(false, |t| t.len() > s.len() && t.ends_with(s.as_str()))
                        && rec(&elems[1..], &tokens[1..])
                }
                PatElem::Gap => (1..=tokens.len()).any(|g| rec(&elems[1..], &tokens[g..])),
            }
        }
        (0..=tokens.len()).any(|i| rec(&self.elems, &tokens[i..]))
    }
}

/// Compiled heuristics plus the complexity weights from the config.
#[derive(Debug, Clone)]
pub struct SceneAnalyzer {
    multi_hop_cues: Vec<CuePattern>,
    comparison_cues: Vec<CuePattern>,
    conjunctions: BTreeSet<String>,
    wh_words: BTreeSet<String>,
    aux_words: BTreeSet<String>,
    style_verbs: BTreeSet<String>,
    weight_multi_hop: f64,
    weight_comparison: f64,
    weight_conjunction: f64,
    weight_length: f64,
    weight_history: f64,
}

impl SceneAnalyzer {
    pub fn from_config(cfg: &Config) -> Result<SceneAnalyzer> {
        let compile = |patterns: &[String]| -> Result<Vec<CuePattern>> {
            patterns.iter().map(|p| CuePattern::parse(p)).collect()
        };
        Ok(SceneAnalyzer {
            multi_hop_cues: compile(&cfg.multi_hop_cues)?,
            comparison_cues: compile(&cfg.comparison_cues)?,
            conjunctions: cfg.conjunctions.iter().cloned().collect(),
            wh_words: cfg.wh_words.iter().cloned().collect(),
            aux_words: cfg.aux_words.iter().cloned().collect(),
            style_verbs: cfg.style_verbs.iter().cloned().collect(),
            weight_multi_hop: cfg.weight_multi_hop,
            weight_comparison: cfg.weight_comparison,
            weight_conjunction: cfg.weight_conjunction,
            weight_length: cfg.weight_length,
            weight_history: cfg.weight_history,
        })
    }

    /// True when any multi-hop signal fires: a configured cue pattern,
    /// chained possessives, or two capitalized spans joined by a relative
    /// clause marker.
    pub fn has_multi_hop_cue(&self, query: &str) -> bool {
        let tokens = tokenize(query);
        self.multi_hop_cues.iter().any(|c| c.matches(&tokens))
            || chained_possessives(query)
            || capitalized_relative_spans(query)
    }

    fn has_comparison_cue(&self, tokens: &[String]) -> bool {
        self.comparison_cues.iter().any(|c| c.matches(tokens))
    }

    /// Weighted sum of structural difficulty signals, clamped to [0,1]:
    /// multi-hop cue, comparison cue, conjunction count (capped at 3),
    /// tokens beyond eight (scaled by eight), and non-empty history.
    pub fn estimate_complexity(&self, query: &str, history: &[String]) -> f64 {
        let tokens = tokenize(query);
        let multi_hop = if self.has_multi_hop_cue(query) { 1.0 } else { 0.0 };
        let comparison = if self.has_comparison_cue(&tokens) { 1.0 } else { 0.0 };
        let conj = tokens
            .iter()
            .filter(|t| self.conjunctions.contains(t.as_str()))
            .count()
            .min(3) as f64;
        let length = (tokens.len() as f64 - 8.0).max(0.0) / 8.0;
        let history_term = if history.is_empty() { 0.0 } else { 1.0 };
        let raw = self.weight_multi_hop * multi_hop
            + self.weight_comparison * comparison
            + self.weight_conjunction * conj
            + self.weight_length * length
            + self.weight_history * history_term;
        raw.clamp(0.0, 1.0)
    }

    fn classify_style(&self, text: &str, tokens: &[String]) -> QueryStyle {
        let trimmed = text.trim_end();
        let first = tokens.first().map(String::as_str).unwrap_or("");
        if trimmed.ends_with('?') || self.wh_words.contains(first) || self.aux_words.contains(first)
        {
            return QueryStyle::Interrogative;
        }
        if tokens.len() <= 4 && !tokens.iter().any(|t| self.style_verbs.contains(t.as_str())) {
            return QueryStyle::Keyword;
        }
        QueryStyle::Declarative
    }

    fn classify_task(&self, request: &SkillRequest, tokens: &[String]) -> TaskType {
        if let Some(raw) = request.meta("task_type") {
            if let Ok(t) = raw.parse::<TaskType>() {
                return t;
            }
        }
        if let Some(tag) = request.query.dataset_tag.as_deref() {
            if let Some(t) = task_for_dataset_tag(tag) {
                return t;
            }
        }
        // Claim-like text reads as a scientific fact check: no question
        // mark anywhere and no leading wh-word.
        let first = tokens.first().map(String::as_str).unwrap_or("");
        if !request.query.text.contains('?') && !self.wh_words.contains(first) {
            return TaskType::Scientific;
        }
        if self.has_multi_hop_cue(&request.query.text) {
            return TaskType::MultiHop;
        }
        TaskType::Direct
    }

    /// Produces the full scene description for a request.
    pub fn analyze(&self, request: &SkillRequest) -> SceneFeatures {
        let text = &request.query.text;
        let tokens = tokenize(text);
        let context_length =
            tokens.len() + request.history.iter().map(|h| tokenize(h).len()).sum::<usize>();
        let document_structure = match request.meta("document_structure") {
            Some("passage") => DocumentStructure::Passage,
            Some("structured") => DocumentStructure::Structured,
            _ => DocumentStructure::Unknown,
        };
        let domain = request
            .meta("domain")
            .map(str::to_string)
            .or_else(|| request.query.dataset_tag.clone())
            .unwrap_or_else(|| "unknown".to_string());
        SceneFeatures {
            task_type: self.classify_task(request, &tokens),
            domain,
            context_length,
            question_complexity: self.estimate_complexity(text, &request.history),
            query_style: self.classify_style(text, &tokens),
            document_structure,
        }
    }
}

/// Maps well-known benchmark tags to their task type.
fn task_for_dataset_tag(tag: &str) -> Option<TaskType> {
    let tag = tag.to_lowercase();
    let tag = tag.strip_prefix("beir/").unwrap_or(&tag);
    match tag {
        "nq" => Some(TaskType::Direct),
        "hotpotqa" => Some(TaskType::MultiHop),
        "scifact" => Some(TaskType::Scientific),
        _ => None,
    }
}

/// Two or more possessive markers suggest an entity chain
/// ("the director's film's composer").
fn chained_possessives(raw: &str) -> bool {
    let lowered = raw.to_lowercase();
    let count = lowered.matches("'s").count() + lowered.matches("\u{2019}s").count();
    count >= 2
}

/// A capitalized span, then a relative clause marker, then another
/// capitalized span ("the film Inception that Christopher Nolan made").
/// Position 0 is ignored because sentence-initial capitals say nothing.
fn capitalized_relative_spans(raw: &str) -> bool {
    const MARKERS: [&str; 4] = ["who", "which", "that", "whose"];
    let words: Vec<&str> = raw.split_whitespace().collect();
    let is_cap = |w: &str| w.chars().next().map_or(false, char::is_uppercase);
    let mut seen_first_entity = false;
    let mut seen_marker = false;
    for (i, word) in words.iter().enumerate() {
        let clean = word.trim_matches(|c: char| !c.is_alphanumeric());
        if seen_first_entity && MARKERS.contains(&clean.to_lowercase().as_str()) {
            seen_marker = true;
            continue;
        }
        if i > 0 && is_cap(word) {
            if seen_marker {
                return true;
            }
            seen_first_entity = true;
        }
    }
    false
}
