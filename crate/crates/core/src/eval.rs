//! Retrieval quality metrics and the benchmark harness built on them.
//!
//! Reports Recall@k, MRR@k and nDCG@k with linear gain, evaluates fixed
//! strategies and routed skill variants over loaded datasets, reads and
//! writes TREC-style run files, and renders comparison tables. Queries
//! with no relevant document are skipped and tallied rather than scored
//! as zero.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::corpus::{QueryRecord, RelevanceJudgments};
use crate::error::{Error, Result};
use crate::memory::{make_record, ExperienceMemory};
use crate::pool::{RankedList, RetrieverPool, StrategyId};
use crate::router::{Router, RoutingPolicy};
use crate::scene::{SceneAnalyzer, SkillRequest};

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidK);
    }
    Ok(())
}

fn relevant_set(grades: &BTreeMap<String, u32>) -> HashSet<&str> {
    grades
        .iter()
        .filter(|&(_, &g)| g > 0)
        .map(|(d, _)| d.as_str())
        .collect()
}

/// Fraction of relevant documents found in the top k.
pub fn recall_at_k(ranked: &[String], grades: &BTreeMap<String, u32>, k: usize) -> Result<f64> {
    check_k(k)?;
    let relevant = relevant_set(grades);
    if relevant.is_empty() {
        return Err(Error::NoRelevantDocs);
    }
    let found: HashSet<&str> = ranked
        .iter()
        .take(k)
        .map(String::as_str)
        .filter(|d| relevant.contains(d))
        .collect();
    Ok(found.len() as f64 / relevant.len() as f64)
}

/// Reciprocal rank of the first relevant document in the top k, zero if
/// none appears.
pub fn mrr_at_k(ranked: &[String], grades: &BTreeMap<String, u32>, k: usize) -> Result<f64> {
    check_k(k)?;
    let relevant = relevant_set(grades);
    if relevant.is_empty() {
        return Err(Error::NoRelevantDocs);
    }
    for (i, doc) in ranked.iter().take(k).enumerate() {
        if relevant.contains(doc.as_str()) {
            return Ok(1.0 / (i + 1) as f64);
        }
    }
    Ok(0.0)
}

/// Normalized discounted cumulative gain with linear gain: each position
/// contributes grade / log2(rank + 1), and the ideal ranking is the
/// grades sorted descending.
pub fn ndcg_at_k(ranked: &[String], grades: &BTreeMap<String, u32>, k: usize) -> Result<f64> {
    check_k(k)?;
    let mut ideal: Vec<u32> = grades.values().copied().filter(|&g| g > 0).collect();
    if ideal.is_empty() {
        return Err(Error::NoRelevantDocs);
    }
    let discount = |i: usize| ((i + 2) as f64).log2();
    let dcg: f64 = ranked
        .iter()
        .take(k)
        .enumerate()
        .map(|(i, d)| grades.get(d).copied().unwrap_or(0) as f64 / discount(i))
        .sum();
    ideal.sort_unstable_by(|a, b| b.cmp(a));
    let idcg: f64 = ideal
        .iter()
        .take(k)
        .enumerate()
        .map(|(i, &g)| g as f64 / discount(i))
        .sum();
    Ok(dcg / idcg)
}

/// The three metrics averaged over a set of queries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub recall_at_k: f64,
    pub mrr_at_k: f64,
    pub ndcg_at_k: f64,
    pub k: usize,
    pub query_count: usize,
}

impl MetricSet {
    /// Unweighted mean over per-query rows; zero metrics when empty.
    pub fn from_rows(rows: &[PerQueryRow], k: usize) -> MetricSet {
        let n = rows.len();
        let mean = |f: fn(&PerQueryRow) -> f64| {
            if n == 0 {
                0.0
            } else {
                rows.iter().map(f).sum::<f64>() / n as f64
            }
        };
        MetricSet {
            recall_at_k: mean(|r| r.recall),
            mrr_at_k: mean(|r| r.mrr),
            ndcg_at_k: mean(|r| r.ndcg),
            k,
            query_count: n,
        }
    }

    pub fn text(&self) -> String {
        format!(
            "queries:   {}\nrecall@{k}: {:.4}\nmrr@{k}:    {:.4}\nndcg@{k}:   {:.4}\n",
            self.query_count,
            self.recall_at_k,
            self.mrr_at_k,
            self.ndcg_at_k,
            k = self.k,
        )
    }

    pub fn csv(&self) -> String {
        format!(
            "k,queries,recall,mrr,ndcg\n{},{},{:.6},{:.6},{:.6}\n",
            self.k, self.query_count, self.recall_at_k, self.mrr_at_k, self.ndcg_at_k
        )
    }
}

/// Metrics for one judged query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerQueryRow {
    pub dataset: String,
    pub query_id: String,
    pub recall: f64,
    pub mrr: f64,
    pub ndcg: f64,
}

/// A run mode: one fixed strategy, or the skill under one routing
/// policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RunMethod {
    Fixed(StrategyId),
    Skill(RoutingPolicy),
}

impl RunMethod {
    pub const ALL: [RunMethod; 8] = [
        RunMethod::Fixed(StrategyId::Bm25),
        RunMethod::Fixed(StrategyId::RewriteBm25),
        RunMethod::Fixed(StrategyId::Dense),
        RunMethod::Fixed(StrategyId::HybridRrf),
        RunMethod::Skill(RoutingPolicy::Rule),
        RunMethod::Skill(RoutingPolicy::Knn),
        RunMethod::Skill(RoutingPolicy::Regress),
        RunMethod::Skill(RoutingPolicy::AdaptiveStyle),
    ];
}

impl fmt::Display for RunMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunMethod::Fixed(s) => write!(f, "fixed:{s}"),
            RunMethod::Skill(p) => write!(f, "skill:{p}"),
        }
    }
}

impl FromStr for RunMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<RunMethod> {
        let unknown = || Error::UnknownMethod(s.to_string());
        match s.split_once(':') {
            Some(("fixed", rest)) => rest
                .parse::<StrategyId>()
                .map(RunMethod::Fixed)
                .map_err(|_| unknown()),
            Some(("skill", rest)) => rest
                .parse::<RoutingPolicy>()
                .map(RunMethod::Skill)
                .map_err(|_| unknown()),
            _ => Err(unknown()),
        }
    }
}

/// One benchmark split: a pool built over its corpus, the queries to
/// run, and their judgments.
#[derive(Debug)]
pub struct Dataset {
    pub name: String,
    pub pool: RetrieverPool,
    pub queries: Vec<QueryRecord>,
    pub qrels: RelevanceJudgments,
}

/// Everything one method earned: per-dataset means, the pooled overall
/// mean, and the full per-query table sorted by (dataset, query_id).
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub method: String,
    pub per_dataset: BTreeMap<String, MetricSet>,
    pub overall: MetricSet,
    pub per_query: Vec<PerQueryRow>,
    pub skipped: usize,
}

fn run_query(
    method: RunMethod,
    pool: &RetrieverPool,
    query: &QueryRecord,
    analyzer: &SceneAnalyzer,
    router: &Router,
    memory: &ExperienceMemory,
    k: usize,
) -> Result<RankedList> {
    let strategy = match method {
        RunMethod::Fixed(s) => s,
        RunMethod::Skill(policy) => {
            let scene = analyzer.analyze(&SkillRequest::from_query(query.clone()));
            router.route(policy, &scene, memory).strategy
        }
    };
    pool.execute_for_query(strategy, query, k)
        .map_err(|e| e.for_query(&query.query_id))
}

/// Runs one method over every judged query of every dataset. Queries
/// without a relevant document are skipped and tallied; a dataset where
/// that leaves nothing is an error.
pub fn evaluate_method(
    method: RunMethod,
    datasets: &[Dataset],
    cfg: &Config,
    memory: &ExperienceMemory,
    k: usize,
) -> Result<RunResult> {
    check_k(k)?;
    if datasets.is_empty() {
        return Err(Error::Invalid("no datasets to evaluate".to_string()));
    }
    let analyzer = SceneAnalyzer::from_config(cfg)?;
    let router = Router::from_config(cfg);
    let mut per_query = Vec::new();
    let mut skipped = 0usize;
    for ds in datasets {
        let mut judged = 0usize;
        for query in &ds.queries {
            let Some(grades) = ds.qrels.for_query(&query.query_id) else {
                skipped += 1;
                continue;
            };
            if !grades.values().any(|&g| g > 0) {
                skipped += 1;
                continue;
            }
            let hits = run_query(method, &ds.pool, query, &analyzer, &router, memory, k)?;
            let ids = hits.doc_ids();
            let wrap = |e: Error| e.for_query(&query.query_id);
            per_query.push(PerQueryRow {
                dataset: ds.name.clone(),
                query_id: query.query_id.clone(),
                recall: recall_at_k(&ids, grades, k).map_err(wrap)?,
                mrr: mrr_at_k(&ids, grades, k).map_err(wrap)?,
                ndcg: ndcg_at_k(&ids, grades, k).map_err(wrap)?,
            });
            judged += 1;
        }
        if judged == 0 {
            return Err(Error::NoJudgedQueries(ds.name.clone()));
        }
    }
    per_query.sort_by(|a, b| {
        a.dataset
            .cmp(&b.dataset)
            .then_with(|| a.query_id.cmp(&b.query_id))
    });
    let mut per_dataset = BTreeMap::new();
    for ds in datasets {
        let rows: Vec<PerQueryRow> = per_query
            .iter()
            .filter(|r| r.dataset == ds.name)
            .cloned()
            .collect();
        per_dataset.insert(ds.name.clone(), MetricSet::from_rows(&rows, k));
    }
    Ok(RunResult {
        method: method.to_string(),
        overall: MetricSet::from_rows(&per_query, k),
        per_dataset,
        per_query,
        skipped,
    })
}

/// One comparison table line, derived from a [`RunResult`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub method: String,
    pub k: usize,
    pub query_count: usize,
    pub recall: f64,
    pub mrr: f64,
    pub ndcg: f64,
    pub per_dataset_ndcg: BTreeMap<String, f64>,
}

/// Methods side by side, sorted by overall nDCG descending with name
/// order breaking ties.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
}

pub fn compare_methods(results: &[RunResult]) -> Result<ComparisonTable> {
    if results.is_empty() {
        return Err(Error::Invalid("nothing to compare".to_string()));
    }
    let mut rows: Vec<ComparisonRow> = results
        .iter()
        .map(|r| ComparisonRow {
            method: r.method.clone(),
            k: r.overall.k,
            query_count: r.overall.query_count,
            recall: r.overall.recall_at_k,
            mrr: r.overall.mrr_at_k,
            ndcg: r.overall.ndcg_at_k,
            per_dataset_ndcg: r
                .per_dataset
                .iter()
                .map(|(name, m)| (name.clone(), m.ndcg_at_k))
                .collect(),
        })
        .collect();
    rows.sort_by(|a, b| {
        b.ndcg
            .total_cmp(&a.ndcg)
            .then_with(|| a.method.cmp(&b.method))
    });
    Ok(ComparisonTable { rows })
}

impl ComparisonTable {
    fn dataset_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self
            .rows
            .iter()
            .flat_map(|r| r.per_dataset_ndcg.keys().cloned())
            .collect();
        names.sort();
        names.dedup();
        names
    }

    fn column_max(&self, get: impl Fn(&ComparisonRow) -> Option<f64>) -> f64 {
        self.rows
            .iter()
            .filter_map(&get)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Aligned text table; the best value in each metric column carries
    /// a `*`.
    pub fn render_text(&self) -> String {
        let k = self.rows.first().map_or(10, |r| r.k);
        let datasets = self.dataset_names();
        let mut headers = vec![
            "method".to_string(),
            format!("recall@{k}"),
            format!("mrr@{k}"),
            format!("ndcg@{k}"),
        ];
        for name in &datasets {
            headers.push(format!("ndcg@{k}[{name}]"));
        }

        let maxima: Vec<f64> = {
            let mut m = vec![
                self.column_max(|r| Some(r.recall)),
                self.column_max(|r| Some(r.mrr)),
                self.column_max(|r| Some(r.ndcg)),
            ];
            for name in &datasets {
                m.push(self.column_max(|r| r.per_dataset_ndcg.get(name).copied()));
            }
            m
        };

        let mut cells: Vec<Vec<String>> = Vec::new();
        for row in &self.rows {
            let mut line = vec![row.method.clone()];
            let mut values = vec![Some(row.recall), Some(row.mrr), Some(row.ndcg)];
            for name in &datasets {
                values.push(row.per_dataset_ndcg.get(name).copied());
            }
            for (value, &max) in values.iter().zip(maxima.iter()) {
                line.push(match value {
                    Some(v) if *v == max => format!("{v:.4}*"),
                    Some(v) => format!("{v:.4}"),
                    None => "-".to_string(),
                });
            }
            cells.push(line);
        }

        let mut widths: Vec<usize> = headers.iter().map(String::len).collect();
        for line in &cells {
            for (w, cell) in widths.iter_mut().zip(line.iter()) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        let render_line = |out: &mut String, line: &[String]| {
            for (i, (cell, w)) in line.iter().zip(widths.iter()).enumerate() {
                if i > 0 {
                    out.push_str("  ");
                }
                let _ = write!(out, "{cell:<w$}");
            }
            while out.ends_with(' ') {
                out.pop();
            }
            out.push('\n');
        };
        render_line(&mut out, &headers);
        for line in &cells {
            render_line(&mut out, line);
        }
        out
    }

    /// Machine-readable CSV with six-digit values, one row per method.
    pub fn render_csv(&self) -> String {
        let k = self.rows.first().map_or(10, |r| r.k);
        let datasets = self.dataset_names();
        let mut out = format!("method,queries,recall@{k},mrr@{k},ndcg@{k}");
        for name in &datasets {
            let _ = write!(out, ",ndcg@{k}:{name}");
        }
        out.push('\n');
        for row in &self.rows {
            let _ = write!(
                out,
                "{},{},{:.6},{:.6},{:.6}",
                row.method, row.query_count, row.recall, row.mrr, row.ndcg
            );
            for name in &datasets {
                match row.per_dataset_ndcg.get(name) {
                    Some(v) => {
                        let _ = write!(out, ",{v:.6}");
                    }
                    None => out.push(','),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// The ablation grid: the rule-routed skill against the three strongest
/// fixed strategies.
pub const ABLATION_METHODS: [RunMethod; 4] = [
    RunMethod::Skill(RoutingPolicy::Rule),
    RunMethod::Fixed(StrategyId::HybridRrf),
    RunMethod::Fixed(StrategyId::Dense),
    RunMethod::Fixed(StrategyId::Bm25),
];

/// Result of [`run_ablation`]: the rendered comparison, the four raw
/// results, and how many feedback records were written.
#[derive(Debug)]
pub struct AblationOutcome {
    pub table: ComparisonTable,
    pub results: Vec<RunResult>,
    pub recorded: usize,
}

/// Evaluates the four ablation methods, optionally recording one
/// experience record per judged query with all four strategies' nDCG as
/// the score vector.
pub fn run_ablation(
    datasets: &[Dataset],
    cfg: &Config,
    memory: &mut ExperienceMemory,
    record_feedback: bool,
    k: usize,
) -> Result<AblationOutcome> {
    let mut results = Vec::with_capacity(ABLATION_METHODS.len());
    for method in ABLATION_METHODS {
        results.push(evaluate_method(method, datasets, cfg, memory, k)?);
    }
    let mut recorded = 0usize;
    if record_feedback {
        let analyzer = SceneAnalyzer::from_config(cfg)?;
        for ds in datasets {
            for query in &ds.queries {
                let Some(grades) = ds.qrels.for_query(&query.query_id) else {
                    continue;
                };
                if !grades.values().any(|&g| g > 0) {
                    continue;
                }
                let scene = analyzer.analyze(&SkillRequest::from_query(query.clone()));
                let mut scores = BTreeMap::new();
                for strategy in StrategyId::ALL {
                    let hits = ds
                        .pool
                        .execute_for_query(strategy, query, k)
                        .map_err(|e| e.for_query(&query.query_id))?;
                    let score = ndcg_at_k(&hits.doc_ids(), grades, k)
                        .map_err(|e| e.for_query(&query.query_id))?;
                    scores.insert(strategy, score);
                }
                memory.append(make_record(&scene, &scores)?)?;
                recorded += 1;
            }
        }
    }
    let table = compare_methods(&results)?;
    Ok(AblationOutcome {
        table,
        results,
        recorded,
    })
}

/// One line of a TREC-style run file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub query_id: String,
    pub doc_id: String,
    pub rank: usize,
    pub score: f64,
    pub method: String,
}

/// Runs a method over queries (no judgments needed) and emits run rows
/// in query order.
pub fn produce_run(
    method: RunMethod,
    pool: &RetrieverPool,
    queries: &[QueryRecord],
    cfg: &Config,
    memory: &ExperienceMemory,
    k: usize,
) -> Result<Vec<RunRow>> {
    check_k(k)?;
    let analyzer = SceneAnalyzer::from_config(cfg)?;
    let router = Router::from_config(cfg);
    let name = method.to_string();
    let mut rows = Vec::new();
    for query in queries {
        let hits = run_query(method, pool, query, &analyzer, &router, memory, k)?;
        for hit in &hits.hits {
            rows.push(RunRow {
                query_id: query.query_id.clone(),
                doc_id: hit.doc_id.clone(),
                rank: hit.rank,
                score: hit.score,
                method: name.clone(),
            });
        }
    }
    Ok(rows)
}

/// Writes `query_id<TAB>doc_id<TAB>rank<TAB>score<TAB>method` lines, no
/// header.
pub fn save_run(path: &Path, rows: &[RunRow]) -> Result<()> {
    let mut out = String::new();
    for r in rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            r.query_id, r.doc_id, r.rank, r.score, r.method
        );
    }
    std::fs::write(path, out).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_run(path: &Path) -> Result<Vec<RunRow>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let malformed = |line: usize, message: String| Error::Malformed {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 5 {
            return Err(malformed(
                lineno,
                format!("expected 5 tab-separated columns, got {}", cols.len()),
            ));
        }
        let rank: usize = cols[2]
            .parse()
            .map_err(|_| malformed(lineno, format!("rank {:?} is not an integer", cols[2])))?;
        if rank == 0 {
            return Err(malformed(lineno, "rank must start at 1".to_string()));
        }
        let score: f64 = cols[3]
            .parse()
            .map_err(|_| malformed(lineno, format!("score {:?} is not a number", cols[3])))?;
        rows.push(RunRow {
            query_id: cols[0].to_string(),
            doc_id: cols[1].to_string(),
            rank,
            score,
            method: cols[4].to_string(),
        });
    }
    Ok(rows)
}

/// Scores a stored run against judgments. Every judged query in the
/// qrels counts, with an empty ranking for queries the run missed; run
/// queries without relevant documents land in the skipped tally.
pub fn evaluate_run(rows: &[RunRow], qrels: &RelevanceJudgments, k: usize) -> Result<RunResult> {
    check_k(k)?;
    if rows.is_empty() {
        return Err(Error::Invalid("run has no rows".to_string()));
    }
    let method = rows[0].method.clone();
    if rows.iter().any(|r| r.method != method) {
        return Err(Error::Invalid(
            "run file mixes more than one method".to_string(),
        ));
    }
    let mut by_query: BTreeMap<&str, Vec<(usize, &str)>> = BTreeMap::new();
    for r in rows {
        by_query
            .entry(r.query_id.as_str())
            .or_default()
            .push((r.rank, r.doc_id.as_str()));
    }
    let skipped = by_query
        .keys()
        .filter(|q| !qrels.has_relevant(q))
        .count();
    let mut per_query = Vec::new();
    for query_id in qrels.query_ids() {
        if !qrels.has_relevant(query_id) {
            continue;
        }
        let grades = qrels.for_query(query_id).expect("judged query present");
        let ids: Vec<String> = match by_query.get(query_id.as_str()) {
            Some(hits) => {
                let mut hits = hits.clone();
                hits.sort_by_key(|&(rank, _)| rank);
                hits.into_iter().map(|(_, d)| d.to_string()).collect()
            }
            None => Vec::new(),
        };
        let wrap = |e: Error| e.for_query(query_id);
        per_query.push(PerQueryRow {
            dataset: "all".to_string(),
            query_id: query_id.clone(),
            recall: recall_at_k(&ids, grades, k).map_err(wrap)?,
            mrr: mrr_at_k(&ids, grades, k).map_err(wrap)?,
            ndcg: ndcg_at_k(&ids, grades, k).map_err(wrap)?,
        });
    }
    if per_query.is_empty() {
        return Err(Error::NoJudgedQueries(method));
    }
    per_query.sort_by(|a, b| a.query_id.cmp(&b.query_id));
    let overall = MetricSet::from_rows(&per_query, k);
    let mut per_dataset = BTreeMap::new();
    per_dataset.insert("all".to_string(), overall);
    Ok(RunResult {
        method,
        per_dataset,
        overall,
        per_query,
        skipped,
    })
}
