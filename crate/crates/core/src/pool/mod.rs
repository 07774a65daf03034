//! The retrieval strategy pool: four self-contained strategies behind one
//! dispatch surface.
//!
//! * `bm25`: Okapi BM25 over an inverted index.
//! * `rewrite_bm25`: BM25 over a stopword-stripped, de-duplicated query.
//! * `dense`: cosine over hashed character-trigram embeddings (or
//!   externally supplied vectors).
//! * `hybrid_rrf`: reciprocal rank fusion of the bm25 and dense lists.
//!
//! All searches return a [`RankedList`] whose ranks run 1..n without gaps,
//! whose scores never increase with rank, and whose score ties are broken
//! by ascending document id. Documents scoring zero are never returned.

pub mod fusion;
pub mod lexical;
pub mod rewrite;
pub mod store;
pub mod tokenize;
pub mod vector;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::corpus::{Document, QueryRecord};
use crate::error::{Error, Result};
use fusion::fuse_rrf;
use lexical::LexicalIndex;
use rewrite::rewrite_query;
use tokenize::tokenize;
use vector::{embed_text, ExternalEmbeddings, VectorIndex};

/// The fixed set of retrieval strategies. Variants are declared in the
/// alphabetical order of their string names so the derived `Ord` is the
/// name order used everywhere ties must break deterministically.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum StrategyId {
    Bm25,
    Dense,
    HybridRrf,
    RewriteBm25,
}

impl StrategyId {
    /// Every strategy, in name order.
    pub const ALL: [StrategyId; 4] = [
        StrategyId::Bm25,
        StrategyId::Dense,
        StrategyId::HybridRrf,
        StrategyId::RewriteBm25,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyId::Bm25 => "bm25",
            StrategyId::Dense => "dense",
            StrategyId::HybridRrf => "hybrid_rrf",
            StrategyId::RewriteBm25 => "rewrite_bm25",
        }
    }
}

impl fmt::Display for StrategyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<StrategyId> {
        match s {
            "bm25" => Ok(StrategyId::Bm25),
            "dense" => Ok(StrategyId::Dense),
            "hybrid_rrf" => Ok(StrategyId::HybridRrf),
            "rewrite_bm25" => Ok(StrategyId::RewriteBm25),
            other => Err(Error::UnknownStrategy(other.to_string())),
        }
    }
}

/// One retrieved document with its 1-based rank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedHit {
    pub doc_id: String,
    pub rank: usize,
    pub score: f64,
    pub strategy: StrategyId,
}

/// An ordered result list satisfying the rank/score invariants above.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RankedList {
    pub hits: Vec<RankedHit>,
}

impl RankedList {
    /// Sorts scored documents (descending score, ascending doc id), drops
    /// non-positive scores, truncates to `k` and assigns ranks 1..n.
    pub fn from_scored(mut scored: Vec<(String, f64)>, k: usize, strategy: StrategyId) -> Self {
        scored.retain(|(_, s)| *s > 0.0);
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        scored.truncate(k);
        RankedList {
            hits: scored
                .into_iter()
                .enumerate()
                .map(|(i, (doc_id, score))| RankedHit {
                    doc_id,
                    rank: i + 1,
                    score,
                    strategy,
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.hits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hits.is_empty()
    }

    pub fn doc_ids(&self) -> Vec<String> {
        self.hits.iter().map(|h| h.doc_id.clone()).collect()
    }

    /// Verifies the structural invariants; used by tests.
    pub fn check_well_formed(&self) -> std::result::Result<(), String> {
        for (i, hit) in self.hits.iter().enumerate() {
            if hit.rank != i + 1 {
                return Err(format!("rank {} at position {i}", hit.rank));
            }
            if hit.score <= 0.0 {
                return Err(format!("non-positive score {} at rank {}", hit.score, hit.rank));
            }
            if i > 0 && self.hits[i - 1].score < hit.score {
                return Err(format!("score increases at rank {}", hit.rank));
            }
        }
        Ok(())
    }
}

/// Retrieval parameters frozen into a pool when it is built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolConfig {
    pub bm25_k1: f64,
    pub bm25_b: f64,
    pub rrf_k: u32,
    pub fetch_depth: usize,
    pub embed_dim: usize,
    pub stopwords: BTreeSet<String>,
}

impl PoolConfig {
    pub fn from_config(cfg: &Config) -> Self {
        PoolConfig {
            bm25_k1: cfg.bm25_k1,
            bm25_b: cfg.bm25_b,
            rrf_k: cfg.rrf_k,
            fetch_depth: cfg.fetch_depth,
            embed_dim: cfg.embed_dim,
            stopwords: cfg.stopwords.iter().cloned().collect(),
        }
    }
}

impl Default for PoolConfig {
    fn default() -> Self {
        PoolConfig::from_config(&Config::default())
    }
}

/// All four strategies over one corpus, sharing a document table.
#[derive(Debug, Clone)]
pub struct RetrieverPool {
    docs: Vec<Document>,
    doc_index: HashMap<String, usize>,
    lexical: LexicalIndex,
    vectors: VectorIndex,
    query_vectors: Option<HashMap<String, Vec<f64>>>,
    cfg: PoolConfig,
    version: String,
}

impl RetrieverPool {
    /// Builds every index with the built-in trigram embedder.
    pub fn build(docs: Vec<Document>, cfg: PoolConfig) -> Result<RetrieverPool> {
        Self::build_inner(docs, cfg, None)
    }

    /// Builds with externally supplied vectors. Every document id must be
    /// covered; ids in the file that match no document are kept as query
    /// vectors.
    pub fn build_with_embeddings(
        docs: Vec<Document>,
        cfg: PoolConfig,
        external: &ExternalEmbeddings,
    ) -> Result<RetrieverPool> {
        Self::build_inner(docs, cfg, Some(external))
    }

    fn build_inner(
        docs: Vec<Document>,
        cfg: PoolConfig,
        external: Option<&ExternalEmbeddings>,
    ) -> Result<RetrieverPool> {
        if docs.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut doc_index = HashMap::with_capacity(docs.len());
        for (i, d) in docs.iter().enumerate() {
            if doc_index.insert(d.doc_id.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate document id {:?}", d.doc_id)));
            }
        }
        let texts: Vec<String> = docs.iter().map(Document::indexed_text).collect();
        let token_docs: Vec<Vec<String>> = texts.iter().map(|t| tokenize(t)).collect();
        let lexical = LexicalIndex::build(&token_docs)?;
        let (vectors, query_vectors) = match external {
            None => (VectorIndex::build_trigram(&texts, cfg.embed_dim)?, None),
            Some(ext) => {
                let ids: Vec<String> = docs.iter().map(|d| d.doc_id.clone()).collect();
                let index = VectorIndex::build_external(&ids, ext)?;
                let leftovers: HashMap<String, Vec<f64>> = ext
                    .vectors
                    .iter()
                    .filter(|(id, _)| !doc_index.contains_key(*id))
                    .map(|(id, v)| (id.clone(), v.clone()))
                    .collect();
                let qv = if leftovers.is_empty() { None } else { Some(leftovers) };
                (index, qv)
            }
        };
        let version = content_version(&docs, vectors.embedder(), &cfg);
        Ok(RetrieverPool {
            docs,
            doc_index,
            lexical,
            vectors,
            query_vectors,
            cfg,
            version,
        })
    }

    /// Attaches (or replaces) the query-id -> vector table used when the
    /// document vectors came from an external embedder.
    pub fn set_query_vectors(&mut self, vectors: HashMap<String, Vec<f64>>) {
        self.query_vectors = if vectors.is_empty() { None } else { Some(vectors) };
    }

    pub fn docs(&self) -> &[Document] {
        &self.docs
    }

    pub fn document(&self, doc_id: &str) -> Option<&Document> {
        self.doc_index.get(doc_id).map(|&i| &self.docs[i])
    }

    pub fn config(&self) -> &PoolConfig {
        &self.cfg
    }

    pub fn lexical(&self) -> &LexicalIndex {
        &self.lexical
    }

    pub fn vectors(&self) -> &VectorIndex {
        &self.vectors
    }

    pub fn query_vectors(&self) -> Option<&HashMap<String, Vec<f64>>> {
        self.query_vectors.as_ref()
    }

    /// Content hash identifying the corpus, embedder and retrieval
    /// parameters this pool was built from.
    pub fn version(&self) -> &str {
        &self.version
    }

    fn to_doc_ids(&self, scored: Vec<(usize, f64)>) -> Vec<(String, f64)> {
        scored
            .into_iter()
            .map(|(doc, s)| (self.docs[doc].doc_id.clone(), s))
            .collect()
    }

    /// Okapi BM25 over the raw query text.
    pub fn search_bm25(&self, query: &str, k: usize) -> Result<RankedList> {
        if k < 1 {
            return Err(Error::InvalidK);
        }
        let scored = self
            .lexical
            .bm25_scores(&tokenize(query), self.cfg.bm25_k1, self.cfg.bm25_b);
        Ok(RankedList::from_scored(
            self.to_doc_ids(scored),
            k,
            StrategyId::Bm25,
        ))
    }

    /// BM25 over the rewritten query; an empty rewrite falls back to the
    /// original query text.
    pub fn search_rewrite_bm25(&self, query: &str, k: usize) -> Result<RankedList> {
        let rewritten = rewrite_query(query, &self.cfg.stopwords);
        let effective = if rewritten.is_empty() { query } else { &rewritten };
        let mut list = self.search_bm25(effective, k)?;
        for hit in &mut list.hits {
            hit.strategy = StrategyId::RewriteBm25;
        }
        Ok(list)
    }

    fn query_vector(&self, query_id: Option<&str>, query_text: &str) -> Result<Vec<f64>> {
        if self.vectors.is_external() {
            let table = self.query_vectors.as_ref().ok_or(Error::EmbedderMismatch {
                embedder: self.vectors.embedder().to_string(),
            })?;
            let id = query_id.ok_or(Error::EmbedderMismatch {
                embedder: self.vectors.embedder().to_string(),
            })?;
            return table.get(id).cloned().ok_or_else(|| Error::MissingVector {
                kind: "query",
                id: id.to_string(),
            });
        }
        embed_text(query_text, self.vectors.dim())
    }

    /// Cosine search with the pool's embedder. With an external embedder
    /// the query must be resolvable by id; plain text cannot be embedded.
    pub fn search_dense(&self, query: &str, k: usize) -> Result<RankedList> {
        self.search_dense_as(None, query, k)
    }

    fn search_dense_as(&self, query_id: Option<&str>, query: &str, k: usize) -> Result<RankedList> {
        if k < 1 {
            return Err(Error::InvalidK);
        }
        let qvec = self.query_vector(query_id, query)?;
        let scored = self.vectors.scores(&qvec)?;
        Ok(RankedList::from_scored(
            self.to_doc_ids(scored),
            k,
            StrategyId::Dense,
        ))
    }

    /// Reciprocal rank fusion of bm25 and dense lists fetched to the
    /// configured depth.
    pub fn search_hybrid_rrf(&self, query: &str, k: usize) -> Result<RankedList> {
        self.search_hybrid_rrf_as(None, query, k)
    }

    fn search_hybrid_rrf_as(
        &self,
        query_id: Option<&str>,
        query: &str,
        k: usize,
    ) -> Result<RankedList> {
        if k < 1 {
            return Err(Error::InvalidK);
        }
        let depth = self.cfg.fetch_depth.max(k);
        let lists = [
            self.search_bm25(query, depth)?,
            self.search_dense_as(query_id, query, depth)?,
        ];
        fuse_rrf(&lists, self.cfg.rrf_k, k)
    }

    /// Runs one strategy on raw query text. Every returned hit is stamped
    /// with the requested strategy.
    pub fn execute(&self, strategy: StrategyId, query: &str, k: usize) -> Result<RankedList> {
        match strategy {
            StrategyId::Bm25 => self.search_bm25(query, k),
            StrategyId::RewriteBm25 => self.search_rewrite_bm25(query, k),
            StrategyId::Dense => self.search_dense(query, k),
            StrategyId::HybridRrf => self.search_hybrid_rrf(query, k),
        }
    }

    /// Runs one strategy for a query record, so externally embedded pools
    /// can resolve the query vector by id.
    pub fn execute_for_query(
        &self,
        strategy: StrategyId,
        query: &QueryRecord,
        k: usize,
    ) -> Result<RankedList> {
        let id = Some(query.query_id.as_str());
        match strategy {
            StrategyId::Bm25 => self.search_bm25(&query.text, k),
            StrategyId::RewriteBm25 => self.search_rewrite_bm25(&query.text, k),
            StrategyId::Dense => self.search_dense_as(id, &query.text, k),
            StrategyId::HybridRrf => self.search_hybrid_rrf_as(id, &query.text, k),
        }
    }
}

fn content_version(docs: &[Document], embedder: &str, cfg: &PoolConfig) -> String {
    let mut hasher = Sha256::new();
    hasher.update(b"exprag-pool-v1\0");
    hasher.update(docs.len().to_le_bytes());
    for d in docs {
        for field in [&d.doc_id, &d.title, &d.text] {
            hasher.update(field.len().to_le_bytes());
            hasher.update(field.as_bytes());
        }
    }
    hasher.update(embedder.as_bytes());
    hasher.update(cfg.bm25_k1.to_le_bytes());
    hasher.update(cfg.bm25_b.to_le_bytes());
    hasher.update(cfg.rrf_k.to_le_bytes());
    hasher.update(cfg.fetch_depth.to_le_bytes());
    let digest = hasher.finalize();
    let mut out = String::with_capacity(16);
    for byte in digest.iter().take(8) {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}
