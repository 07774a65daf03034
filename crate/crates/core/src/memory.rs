//! Append-only store of past retrieval outcomes.
//!
//! Each record pairs a scene description with the quality score every
//! strategy earned on that request. Learned routing policies look up the
//! nearest stored scenes to predict which strategy to run next time.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::corpus::canonical_json;
use crate::error::{Error, Result};
use crate::pool::StrategyId;
use crate::scene::{encode_features, SceneFeatures};

/// One remembered outcome. Fields are kept in alphabetical order so the
/// serialized form matches the canonical key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperienceRecord {
    /// Gap between the best and second-best strategy score, zero when
    /// only one strategy was scored.
    pub best_margin: f64,
    pub best_strategy: StrategyId,
    /// Creation time as microseconds since the Unix epoch.
    pub created_at: i64,
    pub scene_features: SceneFeatures,
    pub score_vector: BTreeMap<StrategyId, f64>,
}

/// Builds a record from scored strategies, stamping the current time.
/// Scores must lie in [0, 1]; the best strategy is the argmax with ties
/// going to the earlier strategy name.
pub fn make_record(
    scene: &SceneFeatures,
    scores: &BTreeMap<StrategyId, f64>,
) -> Result<ExperienceRecord> {
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_micros() as i64)
        .unwrap_or(0);
    make_record_at(scene, scores, now)
}

/// [`make_record`] with an explicit timestamp, for reproducible tests and
/// replays.
pub fn make_record_at(
    scene: &SceneFeatures,
    scores: &BTreeMap<StrategyId, f64>,
    created_at: i64,
) -> Result<ExperienceRecord> {
    if scores.is_empty() {
        return Err(Error::EmptyScores);
    }
    for (&strategy, &value) in scores {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::ScoreOutOfRange {
                strategy: strategy.name().to_string(),
                value,
            });
        }
    }
    // BTreeMap iterates in name order, so strict `>` keeps the earlier
    // name on ties.
    let mut best_strategy = StrategyId::Bm25;
    let mut best = f64::NEG_INFINITY;
    for (&strategy, &value) in scores {
        if value > best {
            best = value;
            best_strategy = strategy;
        }
    }
    let second = scores
        .iter()
        .filter(|(&s, _)| s != best_strategy)
        .map(|(_, &v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    let best_margin = if second.is_finite() { best - second } else { 0.0 };
    Ok(ExperienceRecord {
        best_margin,
        best_strategy,
        created_at,
        scene_features: scene.clone(),
        score_vector: scores.clone(),
    })
}

fn validate_record(record: &ExperienceRecord) -> Result<()> {
    if record.score_vector.is_empty() {
        return Err(Error::EmptyScores);
    }
    for (&strategy, &value) in &record.score_vector {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::ScoreOutOfRange {
                strategy: strategy.name().to_string(),
                value,
            });
        }
    }
    if !record.score_vector.contains_key(&record.best_strategy) {
        return Err(Error::Invalid(format!(
            "best strategy {} missing from its score vector",
            record.best_strategy
        )));
    }
    Ok(())
}

/// Euclidean distance between two scenes in encoded feature space.
pub fn scene_distance(a: &SceneFeatures, b: &SceneFeatures) -> f64 {
    let va = encode_features(a);
    let vb = encode_features(b);
    va.iter()
        .zip(vb.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// The store itself: an in-memory list, optionally mirrored to a JSONL
/// file. Appends hit the file before the in-memory list so a crash never
/// leaves memory ahead of disk.
#[derive(Debug, Default)]
pub struct ExperienceMemory {
    records: Vec<ExperienceRecord>,
    path: Option<PathBuf>,
}

impl ExperienceMemory {
    /// A purely in-memory store.
    pub fn new() -> ExperienceMemory {
        ExperienceMemory::default()
    }

    /// Binds the store to a file, loading any records already in it. A
    /// missing file starts empty and is created on first append.
    pub fn open(path: &Path) -> Result<ExperienceMemory> {
        let mut memory = ExperienceMemory {
            records: Vec::new(),
            path: Some(path.to_path_buf()),
        };
        if path.exists() {
            memory.records = read_records(path)?;
        }
        Ok(memory)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[ExperienceRecord] {
        &self.records
    }

    /// Validates and stores a record, persisting it first when the store
    /// is file-backed.
    pub fn append(&mut self, record: ExperienceRecord) -> Result<()> {
        validate_record(&record)?;
        if let Some(path) = &self.path {
            let mut file = OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(|source| Error::Io {
                    path: path.to_path_buf(),
                    source,
                })?;
            let line = canonical_json(&record)?;
            writeln!(file, "{line}").map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
        }
        self.records.push(record);
        Ok(())
    }

    /// Writes every record to `path` in canonical form, one per line.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        for record in &self.records {
            out.push_str(&canonical_json(record)?);
            out.push('\n');
        }
        let mut file = File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        file.write_all(out.as_bytes()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    /// The `k` records whose scenes sit closest to `scene`, nearest
    /// first. Equal distances break toward the newer record.
    pub fn nearest(&self, scene: &SceneFeatures, k: usize) -> Vec<&ExperienceRecord> {
        let mut order: Vec<(usize, f64)> = self
            .records
            .iter()
            .enumerate()
            .map(|(i, r)| (i, scene_distance(scene, &r.scene_features)))
            .collect();
        order.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| b.0.cmp(&a.0)));
        order
            .into_iter()
            .take(k)
            .map(|(i, _)| &self.records[i])
            .collect()
    }
}

fn read_records(path: &Path) -> Result<Vec<ExperienceRecord>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut records = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: ExperienceRecord =
            serde_json::from_str(line).map_err(|e| Error::Malformed {
                path: path.to_path_buf(),
                line: idx + 1,
                message: e.to_string(),
            })?;
        validate_record(&record).map_err(|e| Error::Malformed {
            path: path.to_path_buf(),
            line: idx + 1,
            message: e.to_string(),
        })?;
        records.push(record);
    }
    Ok(records)
}
