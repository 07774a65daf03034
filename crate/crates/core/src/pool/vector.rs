//! Hashed character-trigram embeddings and the dense index over them.
//!
//! The embedder is intentionally simple and fully deterministic: it hashes
//! every character trigram of the lowercased text with 64-bit FNV-1a into
//! one of `dim` buckets, accumulates counts and L2-normalizes. When an
//! external embedding file supplies vectors for every document and query,
//! it replaces the built-in embedder entirely.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest accepted hash dimensionality for the built-in embedder.
pub const MIN_EMBED_DIM: usize = 16;

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Embeds `text` into a unit-norm `dim`-dimensional bucket-count vector.
/// Texts shorter than one trigram embed to the zero vector.
pub fn embed_text(text: &str, dim: usize) -> Result<Vec<f64>> {
    if dim < MIN_EMBED_DIM {
        return Err(Error::InvalidDim(dim));
    }
    let chars: Vec<char> = text.to_lowercase().chars().collect();
    let mut v = vec![0.0f64; dim];
    if chars.len() < 3 {
        return Ok(v);
    }
    let mut buf = String::new();
    for win in chars.windows(3) {
        buf.clear();
        buf.extend(win);
        let bucket = (fnv1a64(buf.as_bytes()) % dim as u64) as usize;
        v[bucket] += 1.0;
    }
    normalize(&mut v);
    Ok(v)
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}

/// Cosine similarity of two unit-norm vectors, i.e. their dot product.
/// A zero vector on either side yields 0.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dense index: one unit-norm (or zero) vector per internal document id.
#[derive(Debug, Clone)]
pub struct VectorIndex {
    vectors: Vec<Vec<f64>>,
    dim: usize,
    embedder: String,
}

impl VectorIndex {
    /// Embeds every document text with the built-in trigram embedder.
    pub fn build_trigram(texts: &[String], dim: usize) -> Result<VectorIndex> {
        if texts.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let vectors = texts
            .iter()
            .map(|t| embed_text(t, dim))
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorIndex {
            vectors,
            dim,
            embedder: format!("hashed_trigram(dim={dim})"),
        })
    }

    /// Builds the index from externally supplied vectors, one per document
    /// id in `doc_ids` order. Vectors are re-normalized defensively.
    pub fn build_external(
        doc_ids: &[String],
        external: &ExternalEmbeddings,
    ) -> Result<VectorIndex> {
        if doc_ids.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut vectors = Vec::with_capacity(doc_ids.len());
        for id in doc_ids {
            let v = external.vectors.get(id).ok_or_else(|| Error::MissingVector {
                kind: "document",
                id: id.clone(),
            })?;
            let mut v = v.clone();
            normalize(&mut v);
            vectors.push(v);
        }
        Ok(VectorIndex {
            dim: external.dim,
            vectors,
            embedder: format!("external(dim={})", external.dim),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn embedder(&self) -> &str {
        &self.embedder
    }

    pub fn is_external(&self) -> bool {
        self.embedder.starts_with("external(")
    }

    pub fn vector(&self, doc: usize) -> &[f64] {
        &self.vectors[doc]
    }

    /// Scores every document against `query_vec` by cosine. Unordered
    /// (internal id, score) pairs; zero scores included for the caller to
    /// filter.
    pub fn scores(&self, query_vec: &[f64]) -> Result<Vec<(usize, f64)>> {
        if query_vec.len() != self.dim {
            return Err(Error::DimMismatch {
                index: self.dim,
                query: query_vec.len(),
            });
        }
        Ok(self
            .vectors
            .iter()
            .enumerate()
            .map(|(doc, v)| (doc, cosine(query_vec, v)))
            .collect())
    }
}

/// Vectors loaded from a JSON-Lines file of `{"_id": ..., "vector": [...]}`
/// rows. One file may mix document and query ids.
#[derive(Debug, Clone)]
pub struct ExternalEmbeddings {
    pub vectors: HashMap<String, Vec<f64>>,
    pub dim: usize,
    pub source: String,
}

#[derive(Serialize, Deserialize)]
struct EmbeddingLine {
    _id: String,
    vector: Vec<f64>,
}

/// Loads an embedding file, re-normalizing every vector and requiring a
/// single consistent dimensionality.
pub fn load_embeddings(path: &Path) -> Result<ExternalEmbeddings> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut vectors = HashMap::new();
    let mut dim: Option<usize> = None;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec: EmbeddingLine = serde_json::from_str(line).map_err(|e| Error::Malformed {
            path: path.to_path_buf(),
            line: lineno,
            message: e.to_string(),
        })?;
        match dim {
            None => dim = Some(rec.vector.len()),
            Some(d) if d != rec.vector.len() => {
                return Err(Error::Malformed {
                    path: path.to_path_buf(),
                    line: lineno,
                    message: format!(
                        "vector for {:?} has dimension {}, expected {d}",
                        rec._id,
                        rec.vector.len()
                    ),
                });
            }
            _ => {}
        }
        if rec.vector.is_empty() {
            return Err(Error::Malformed {
                path: path.to_path_buf(),
                line: lineno,
                message: format!("vector for {:?} is empty", rec._id),
            });
        }
        let mut v = rec.vector;
        normalize(&mut v);
        if vectors.insert(rec._id.clone(), v).is_some() {
            return Err(Error::DuplicateId {
                path: path.to_path_buf(),
                line: lineno,
                id: rec._id,
            });
        }
    }
    let dim = dim.ok_or_else(|| Error::Malformed {
        path: path.to_path_buf(),
        line: 1,
        message: "embedding file is empty".into(),
    })?;
    Ok(ExternalEmbeddings {
        vectors,
        dim,
        source: path.display().to_string(),
    })
}

/// Writes embeddings in the same JSON-Lines form `load_embeddings` reads,
/// sorted by id.
pub fn save_embeddings(vectors: &[(String, Vec<f64>)], path: &Path) -> Result<()> {
    let mut rows: Vec<&(String, Vec<f64>)> = vectors.iter().collect();
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out = String::new();
    for (id, v) in rows {
        let line = EmbeddingLine {
            _id: id.clone(),
            vector: v.clone(),
        };
        out.push_str(&crate::corpus::canonical_json(&line)?);
        out.push('\n');
    }
    fs::write(path, out).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
