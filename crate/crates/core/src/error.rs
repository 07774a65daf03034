//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong across ingestion, retrieval, routing,
/// orchestration and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A file line that does not satisfy the expected format. The line
    /// number is 1-based.
    #[error("{path}:{line}: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}: duplicate id {id:?}")]
    DuplicateId {
        path: PathBuf,
        line: usize,
        id: String,
    },

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("result depth k must be at least 1")]
    InvalidK,

    #[error("embedding dimension must be at least 16, got {0}")]
    InvalidDim(usize),

    #[error("vector dimension mismatch: index has {index}, query has {query}")]
    DimMismatch { index: usize, query: usize },

    #[error("reciprocal rank fusion needs at least 2 lists, got {0}")]
    TooFewLists(usize),

    #[error("no embedding supplied for {kind} id {id:?}")]
    MissingVector { kind: &'static str, id: String },

    #[error("index embeds with {embedder:?}; raw query text cannot be embedded to match")]
    EmbedderMismatch { embedder: String },

    #[error("score for {strategy} out of range [0,1]: {value}")]
    ScoreOutOfRange { strategy: String, value: f64 },

    #[error("score vector is empty")]
    EmptyScores,

    #[error("ranked hit references unknown document id {0:?}")]
    UnknownDoc(String),

    #[error("query has no relevant documents in the judgments")]
    NoRelevantDocs,

    #[error("dataset {0:?} has no judged queries")]
    NoJudgedQueries(String),

    #[error("query {query_id:?}: {source}")]
    QueryContext {
        query_id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("unknown method {0:?}")]
    UnknownMethod(String),

    #[error("unknown policy {0:?}")]
    UnknownPolicy(String),

    #[error("unknown strategy {0:?}")]
    UnknownStrategy(String),

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    /// Wraps an error with the query id it occurred under.
    pub fn for_query(self, query_id: &str) -> Error {
        Error::QueryContext {
            query_id: query_id.to_string(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
