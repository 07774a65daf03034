//! Document, query and relevance-judgment collections and their file
//! formats.
//!
//! Corpora and query sets are JSON-Lines (one object per line); judgments
//! are three-column TSV. Loaders validate ids, report the offending line
//! number on malformed input, and reject invalid UTF-8 outright. Every
//! collection round-trips through its own `save_*` function unchanged.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One retrievable document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub doc_id: String,
    pub title: String,
    pub text: String,
}

impl Document {
    /// The string handed to both the lexical index and the embedder.
    pub fn indexed_text(&self) -> String {
        if self.title.is_empty() {
            self.text.clone()
        } else if self.text.is_empty() {
            self.title.clone()
        } else {
            format!("{} {}", self.title, self.text)
        }
    }
}

/// One query, optionally tagged with its source dataset and free-form
/// string metadata.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QueryRecord {
    pub query_id: String,
    pub text: String,
    pub dataset_tag: Option<String>,
    pub metadata: BTreeMap<String, String>,
}

/// Graded relevance judgments: query id -> document id -> grade.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RelevanceJudgments {
    grades: BTreeMap<String, BTreeMap<String, u32>>,
}

impl RelevanceJudgments {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a judgment, returning the previous grade if one existed.
    pub fn insert(&mut self, query_id: &str, doc_id: &str, grade: u32) -> Option<u32> {
        self.grades
            .entry(query_id.to_string())
            .or_default()
            .insert(doc_id.to_string(), grade)
    }

    /// All judgments for one query, if any.
    pub fn for_query(&self, query_id: &str) -> Option<&BTreeMap<String, u32>> {
        self.grades.get(query_id)
    }

    /// True when the query has at least one grade > 0.
    pub fn has_relevant(&self, query_id: &str) -> bool {
        self.grades
            .get(query_id)
            .map_or(false, |m| m.values().any(|&g| g > 0))
    }

    pub fn query_ids(&self) -> impl Iterator<Item = &String> {
        self.grades.keys()
    }

    pub fn len(&self) -> usize {
        self.grades.values().map(|m| m.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.grades.is_empty()
    }

    /// Document ids referenced by the judgments but absent from `docs`,
    /// each reported once, in sorted order.
    pub fn dangling_doc_ids(&self, docs: &[Document]) -> Vec<String> {
        let known: HashSet<&str> = docs.iter().map(|d| d.doc_id.as_str()).collect();
        let mut missing: Vec<String> = self
            .grades
            .values()
            .flat_map(|m| m.keys())
            .filter(|id| !known.contains(id.as_str()))
            .cloned()
            .collect();
        missing.sort();
        missing.dedup();
        missing
    }
}

#[derive(Serialize, Deserialize)]
struct CorpusLine {
    _id: String,
    title: String,
    text: String,
}

#[derive(Serialize, Deserialize)]
struct QueryLine {
    _id: String,
    text: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    dataset_tag: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    metadata: Option<BTreeMap<String, serde_json::Value>>,
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(text.lines().map(str::to_string).collect())
}

/// Loads a corpus file, preserving file order.
pub fn load_corpus(path: &Path) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for (i, line) in read_lines(path)?.iter().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec: CorpusLine = serde_json::from_str(line).map_err(|e| Error::Malformed {
            path: path.to_path_buf(),
            line: lineno,
            message: e.to_string(),
        })?;
        if rec._id.is_empty() {
            return Err(Error::Malformed {
                path: path.to_path_buf(),
                line: lineno,
                message: "document id is empty".into(),
            });
        }
        if rec.title.is_empty() && rec.text.is_empty() {
            return Err(Error::Malformed {
                path: path.to_path_buf(),
                line: lineno,
                message: format!("document {:?} has empty title and text", rec._id),
            });
        }
        if !seen.insert(rec._id.clone()) {
            return Err(Error::DuplicateId {
                path: path.to_path_buf(),
                line: lineno,
                id: rec._id,
            });
        }
        docs.push(Document {
            doc_id: rec._id,
            title: rec.title,
            text: rec.text,
        });
    }
    Ok(docs)
}

/// Writes a corpus in the same JSON-Lines form `load_corpus` reads.
pub fn save_corpus(docs: &[Document], path: &Path) -> Result<()> {
    let mut out = String::new();
    for d in docs {
        let line = CorpusLine {
            _id: d.doc_id.clone(),
            title: d.title.clone(),
            text: d.text.clone(),
        };
        out.push_str(&canonical_json(&line)?);
        out.push('\n');
    }
    fs::write(path, out).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn coerce_metadata(
    raw: BTreeMap<String, serde_json::Value>,
    path: &Path,
    lineno: usize,
) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (k, v) in raw {
        let s = match v {
            serde_json::Value::String(s) => s,
            serde_json::Value::Number(n) => n.to_string(),
            serde_json::Value::Bool(b) => b.to_string(),
            other => {
                return Err(Error::Malformed {
                    path: path.to_path_buf(),
                    line: lineno,
                    message: format!("metadata value for {k:?} is not a scalar: {other}"),
                })
            }
        };
        out.insert(k, s);
    }
    Ok(out)
}

/// Loads a query file, preserving file order.
pub fn load_queries(path: &Path) -> Result<Vec<QueryRecord>> {
    let mut queries = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for (i, line) in read_lines(path)?.iter().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec: QueryLine = serde_json::from_str(line).map_err(|e| Error::Malformed {
            path: path.to_path_buf(),
            line: lineno,
            message: e.to_string(),
        })?;
        if rec._id.is_empty() {
            return Err(Error::Malformed {
                path: path.to_path_buf(),
                line: lineno,
                message: "query id is empty".into(),
            });
        }
        if rec.text.is_empty() {
            return Err(Error::Malformed {
                path: path.to_path_buf(),
                line: lineno,
                message: format!("query {:?} has empty text", rec._id),
            });
        }
        if !seen.insert(rec._id.clone()) {
            return Err(Error::DuplicateId {
                path: path.to_path_buf(),
                line: lineno,
                id: rec._id,
            });
        }
        queries.push(QueryRecord {
            query_id: rec._id,
            text: rec.text,
            dataset_tag: rec.dataset_tag,
            metadata: match rec.metadata {
                Some(raw) => coerce_metadata(raw, path, lineno)?,
                None => BTreeMap::new(),
            },
        });
    }
    Ok(queries)
}

/// Writes queries in the same JSON-Lines form `load_queries` reads.
pub fn save_queries(queries: &[QueryRecord], path: &Path) -> Result<()> {
    let mut out = String::new();
    for q in queries {
        let line = QueryLine {
            _id: q.query_id.clone(),
            text: q.text.clone(),
            dataset_tag: q.dataset_tag.clone(),
            metadata: if q.metadata.is_empty() {
                None
            } else {
                Some(
                    q.metadata
                        .iter()
                        .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
                        .collect(),
                )
            },
        };
        out.push_str(&canonical_json(&line)?);
        out.push('\n');
    }
    fs::write(path, out).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a qrels TSV of `query-id <TAB> corpus-id <TAB> grade` rows.
///
/// A leading header row is skipped when its first column says `query-id`
/// (or `query_id`) and its grade column is not an integer. A repeated
/// (query, doc) pair overwrites the earlier grade and adds a warning to the
/// returned list.
pub fn load_qrels(path: &Path) -> Result<(RelevanceJudgments, Vec<String>)> {
    let mut judgments = RelevanceJudgments::new();
    let mut warnings = Vec::new();
    for (i, line) in read_lines(path)?.iter().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < 3 {
            return Err(Error::Malformed {
                path: path.to_path_buf(),
                line: lineno,
                message: format!("expected 3 tab-separated columns, got {}", cols.len()),
            });
        }
        let header_name = cols[0].eq_ignore_ascii_case("query-id")
            || cols[0].eq_ignore_ascii_case("query_id");
        if lineno == 1 && header_name && cols[2].trim().parse::<i64>().is_err() {
            continue;
        }
        let grade: i64 = cols[2].trim().parse().map_err(|_| Error::Malformed {
            path: path.to_path_buf(),
            line: lineno,
            message: format!("grade {:?} is not an integer", cols[2]),
        })?;
        if grade < 0 {
            return Err(Error::Malformed {
                path: path.to_path_buf(),
                line: lineno,
                message: format!("grade {grade} is negative"),
            });
        }
        if let Some(old) = judgments.insert(cols[0], cols[1], grade as u32) {
            warnings.push(format!(
                "{}:{lineno}: duplicate judgment for ({}, {}); grade {old} replaced by {grade}",
                path.display(),
                cols[0],
                cols[1]
            ));
        }
    }
    Ok((judgments, warnings))
}

/// Writes judgments as a TSV with the conventional header row; rows are
/// sorted by (query id, document id).
pub fn save_qrels(judgments: &RelevanceJudgments, path: &Path) -> Result<()> {
    let mut out = String::from("query-id\tcorpus-id\tscore\n");
    for (qid, docs) in &judgments.grades {
        for (did, grade) in docs {
            out.push_str(&format!("{qid}\t{did}\t{grade}\n"));
        }
    }
    fs::write(path, out).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Serializes with object keys sorted, so identical values always produce
/// identical bytes.
pub(crate) fn canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Invalid(e.to_string()))?;
    serde_json::to_string(&v).map_err(|e| Error::Invalid(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Write;

    fn tmp(content: &[u8]) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content).unwrap();
        f
    }

    #[test]
    fn corpus_line_maps_into_document() {
        let f = tmp(br#"{"_id":"d1","title":"T","text":"Body"}"#);
        let docs = load_corpus(f.path()).unwrap();
        assert_eq!(
            docs,
            vec![Document {
                doc_id: "d1".into(),
                title: "T".into(),
                text: "Body".into()
            }]
        );
    }

    #[test]
    fn empty_corpus_file_loads_as_empty_list() {
        let f = tmp(b"");
        assert!(load_corpus(f.path()).unwrap().is_empty());
    }

    #[test]
    fn duplicate_doc_id_is_rejected_by_name() {
        let f = tmp(
            br#"{"_id":"d1","title":"","text":"a"}
{"_id":"d1","title":"","text":"b"}"#,
        );
        let err = load_corpus(f.path()).unwrap_err();
        assert!(err.to_string().contains("d1"), "{err}");
    }

    #[test]
    fn document_missing_text_field_reports_line_number() {
        let f = tmp(
            br#"{"_id":"d1","title":"t","text":"x"}
{"_id":"d2","title":"t"}"#,
        );
        let err = load_corpus(f.path()).unwrap_err();
        assert!(err.to_string().contains(":2:"), "{err}");
    }

    #[test]
    fn document_with_empty_title_and_text_is_malformed() {
        let f = tmp(br#"{"_id":"d1","title":"","text":""}"#);
        assert!(load_corpus(f.path()).is_err());
    }

    #[test]
    fn invalid_utf8_is_a_hard_error() {
        let f = tmp(&[0xff, 0xfe, b'{', b'}']);
        assert!(load_corpus(f.path()).is_err());
    }

    #[test]
    fn query_metadata_values_are_coerced_to_strings() {
        let f = tmp(br#"{"_id":"q1","text":"t","metadata":{"task_type":"multi_hop","hops":2,"hard":true}}"#);
        let qs = load_queries(f.path()).unwrap();
        assert_eq!(qs[0].metadata["task_type"], "multi_hop");
        assert_eq!(qs[0].metadata["hops"], "2");
        assert_eq!(qs[0].metadata["hard"], "true");
    }

    #[test]
    fn query_with_empty_text_is_rejected() {
        let f = tmp(br#"{"_id":"q1","text":""}"#);
        assert!(load_queries(f.path()).is_err());
    }

    #[test]
    fn qrels_row_parses_and_header_is_skipped() {
        let f = tmp(b"query-id\tcorpus-id\tscore\nq1\td3\t2\n");
        let (j, warnings) = load_qrels(f.path()).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(j.for_query("q1").unwrap()["d3"], 2);
    }

    #[test]
    fn qrels_non_integer_grade_cites_the_line() {
        let f = tmp(b"q1\td1\tx\n");
        let err = load_qrels(f.path()).unwrap_err();
        assert!(err.to_string().contains(":1:"), "{err}");
    }

    #[test]
    fn qrels_negative_grade_is_rejected() {
        let f = tmp(b"q1\td1\t-1\n");
        assert!(load_qrels(f.path()).is_err());
    }

    #[test]
    fn qrels_two_columns_is_malformed() {
        let f = tmp(b"q1\td1\n");
        assert!(load_qrels(f.path()).is_err());
    }

    #[test]
    fn qrels_duplicate_pair_overwrites_with_warning() {
        let f = tmp(b"q1\td1\t1\nq1\td1\t0\n");
        let (j, warnings) = load_qrels(f.path()).unwrap();
        assert_eq!(j.for_query("q1").unwrap()["d1"], 0);
        assert_eq!(warnings.len(), 1);
        assert!(!j.has_relevant("q1"));
    }

    #[test]
    fn dangling_doc_ids_are_reported_once_each() {
        let f = tmp(b"q1\tmissing\t1\nq2\tmissing\t1\nq2\td1\t1\n");
        let (j, _) = load_qrels(f.path()).unwrap();
        let docs = vec![Document {
            doc_id: "d1".into(),
            title: String::new(),
            text: "x".into(),
        }];
        assert_eq!(j.dangling_doc_ids(&docs), vec!["missing".to_string()]);
    }

    #[test]
    fn corpus_round_trips_through_save_and_load() {
        let docs = vec![
            Document {
                doc_id: "d1".into(),
                title: "Alpha".into(),
                text: "first body".into(),
            },
            Document {
                doc_id: "d2".into(),
                title: String::new(),
                text: "second body".into(),
            },
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        save_corpus(&docs, &path).unwrap();
        assert_eq!(load_corpus(&path).unwrap(), docs);
    }

    #[test]
    fn queries_round_trip_through_save_and_load() {
        let queries = vec![QueryRecord {
            query_id: "q1".into(),
            text: "what is x".into(),
            dataset_tag: Some("nq".into()),
            metadata: BTreeMap::from([("task_type".to_string(), "direct".to_string())]),
        }];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("queries.jsonl");
        save_queries(&queries, &path).unwrap();
        assert_eq!(load_queries(&path).unwrap(), queries);
    }

    #[test]
    fn qrels_round_trip_through_save_and_load() {
        let mut j = RelevanceJudgments::new();
        j.insert("q1", "d1", 2);
        j.insert("q1", "d2", 0);
        j.insert("q2", "d9", 1);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("qrels.tsv");
        save_qrels(&j, &path).unwrap();
        let (loaded, warnings) = load_qrels(&path).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(loaded, j);
    }

    proptest! {
        #[test]
        fn random_corpora_round_trip(docs in proptest::collection::vec(
            ("[a-z0-9]{1,8}", "[ -~]{0,30}", "[ -~]{1,60}"), 0..20)
        ) {
            let mut seen = HashSet::new();
            let docs: Vec<Document> = docs
                .into_iter()
                .filter(|(id, _, _)| seen.insert(id.clone()))
                .map(|(doc_id, title, text)| Document { doc_id, title, text })
                .collect();
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("c.jsonl");
            save_corpus(&docs, &path).unwrap();
            prop_assert_eq!(load_corpus(&path).unwrap(), docs);
        }
    }
}
