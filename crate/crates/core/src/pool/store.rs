//! On-disk form of a built retriever pool.
//!
//! An index directory holds the canonical corpus copy, a metadata file with
//! the frozen retrieval parameters, and, when an external embedder was
//! used, the document and query vectors. Pools built with the trigram
//! embedder re-embed on load, which is cheap and bit-reproducible.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{self, canonical_json};
use crate::error::{Error, Result};
use crate::pool::vector::{load_embeddings, save_embeddings, ExternalEmbeddings};
use crate::pool::{PoolConfig, RetrieverPool};

const DOCS_FILE: &str = "docs.jsonl";
const META_FILE: &str = "meta.json";
const DOC_VECTORS_FILE: &str = "doc_vectors.jsonl";
const QUERY_VECTORS_FILE: &str = "query_vectors.jsonl";

#[derive(Serialize, Deserialize)]
struct IndexMeta {
    avgdl: f64,
    doc_count: usize,
    embedder: String,
    pool: PoolConfig,
    version: String,
    vocabulary: usize,
}

/// Persists a pool into `dir`, creating it if needed.
pub fn save_index(pool: &RetrieverPool, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    corpus::save_corpus(pool.docs(), &dir.join(DOCS_FILE))?;
    let meta = IndexMeta {
        avgdl: pool.lexical().avg_doc_length(),
        doc_count: pool.docs().len(),
        embedder: pool.vectors().embedder().to_string(),
        pool: pool.config().clone(),
        version: pool.version().to_string(),
        vocabulary: pool.lexical().vocabulary_size(),
    };
    let meta_path = dir.join(META_FILE);
    fs::write(&meta_path, canonical_json(&meta)? + "\n").map_err(|source| Error::Io {
        path: meta_path,
        source,
    })?;
    if pool.vectors().is_external() {
        let rows: Vec<(String, Vec<f64>)> = pool
            .docs()
            .iter()
            .enumerate()
            .map(|(i, d)| (d.doc_id.clone(), pool.vectors().vector(i).to_vec()))
            .collect();
        save_embeddings(&rows, &dir.join(DOC_VECTORS_FILE))?;
        if let Some(qv) = pool.query_vectors() {
            let rows: Vec<(String, Vec<f64>)> =
                qv.iter().map(|(id, v)| (id.clone(), v.clone())).collect();
            save_embeddings(&rows, &dir.join(QUERY_VECTORS_FILE))?;
        }
    }
    Ok(())
}

/// Loads a pool from an index directory and verifies its content hash.
pub fn load_index(dir: &Path) -> Result<RetrieverPool> {
    let meta_path = dir.join(META_FILE);
    let meta_text = fs::read_to_string(&meta_path).map_err(|source| Error::Io {
        path: meta_path.clone(),
        source,
    })?;
    let meta: IndexMeta = serde_json::from_str(&meta_text).map_err(|e| Error::Malformed {
        path: meta_path.clone(),
        line: 1,
        message: e.to_string(),
    })?;
    let docs = corpus::load_corpus(&dir.join(DOCS_FILE))?;
    let pool = if meta.embedder.starts_with("external(") {
        let doc_vecs = load_embeddings(&dir.join(DOC_VECTORS_FILE))?;
        let mut all: HashMap<String, Vec<f64>> = doc_vecs.vectors;
        let qv_path = dir.join(QUERY_VECTORS_FILE);
        if qv_path.exists() {
            let qv = load_embeddings(&qv_path)?;
            if qv.dim != doc_vecs.dim {
                return Err(Error::DimMismatch {
                    index: doc_vecs.dim,
                    query: qv.dim,
                });
            }
            all.extend(qv.vectors);
        }
        let combined = ExternalEmbeddings {
            vectors: all,
            dim: doc_vecs.dim,
            source: dir.display().to_string(),
        };
        RetrieverPool::build_with_embeddings(docs, meta.pool.clone(), &combined)?
    } else {
        RetrieverPool::build(docs, meta.pool.clone())?
    };
    if pool.version() != meta.version {
        return Err(Error::Malformed {
            path: meta_path,
            line: 1,
            message: format!(
                "index content hash {} does not match recorded version {}",
                pool.version(),
                meta.version
            ),
        });
    }
    Ok(pool)
}
