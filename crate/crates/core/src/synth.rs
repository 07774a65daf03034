//! Deterministic synthetic benchmark generator.
//!
//! Emits three task splits (direct, multi_hop, scientific) whose corpora
//! are engineered so a different fixed strategy wins each split: direct
//! queries are built for dense retrieval, the other two for rank fusion.
//! Keyword and filler vocabularies use disjoint letter sets, so filler
//! text shares no character trigrams with any query and background
//! documents score zero under every strategy. Keywords are fixed-length
//! consonant-vowel words built from syllables that never repeat within a
//! query, which keeps every query's trigram profile identical up to
//! letter renaming and makes the engineered rank gaps uniform.
//!
//! Per direct query the corpus holds one relevant doc (exact keywords in
//! query order plus suffixed variants, which carry the keyword trigrams
//! without matching BM25 terms), a filler-heavy decoy with each keyword
//! four times that tops BM25, and a milder doubled decoy. That yields
//! dense [rel, decoys], BM25 [decoys, rel], fused rel at rank 2.
//!
//! Per multi_hop or scientific query it holds a relevant doc with two
//! exact and two variant keywords (rank 2 under both BM25 and dense), a
//! long lexical decoy that tops BM25 but drowns in filler under cosine,
//! a carrier doc of prefix and suffix variants arranged to reproduce the
//! query's token-boundary trigrams (dense rank 1), and a diluted variant
//! buffer holding dense rank 3 so the lexical decoy cannot reach the
//! fused top. Reciprocal ranks 2+2 then beat 1+4, so only fusion puts
//! the relevant doc first.
//!
//! The hashed embedder folds unrelated trigrams into shared buckets, so
//! cosine gaps drift per draw. The generator measures every engineered
//! document against its query with the default embedding size and
//! redraws until adjacent ranks are separated by a fixed margin. After
//! writing a split it also evaluates all fixed strategies on it and
//! records the favored strategy's realized nDCG lead in the manifest,
//! rejecting any seed where that lead falls under the floor.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::index;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::Config;
use crate::corpus::{
    load_corpus, load_qrels, load_queries, save_corpus, save_qrels, save_queries, Document,
    QueryRecord, RelevanceJudgments,
};
use crate::error::{Error, Result};
use crate::eval::{evaluate_method, Dataset, RunMethod};
use crate::memory::ExperienceMemory;
use crate::pool::vector::{cosine, embed_text};
use crate::pool::{PoolConfig, RetrieverPool, StrategyId};
use crate::scene::TaskType;

pub const MANIFEST_FILE: &str = "manifest.tsv";
const CORPUS_FILE: &str = "corpus.jsonl";
const QUERIES_FILE: &str = "queries.jsonl";
const QRELS_FILE: &str = "qrels.tsv";

const RELEVANT_SUFFIXES: [&str; 3] = ["s", "e", "u"];
const BUFFER_SUFFIXES: [&str; 2] = ["x", "y"];
const FILLER_POOL_SIZE: usize = 150;

/// Minimum cosine separation enforced between adjacently ranked
/// engineered documents, measured with the default embedding size. Hash
/// collisions in the trigram embedder add noise per draw, so documents
/// are redrawn until the gaps hold.
const DENSE_GAP: f64 = 0.05;
const MAX_DRAWS: usize = 500;

/// Smallest acceptable nDCG lead of a split's favored strategy over the
/// best other fixed strategy, measured at this cutoff under the default
/// configuration. Generation fails rather than emit a weaker split.
const MIN_MARGIN: f64 = 0.02;
const MEASURE_K: usize = 10;

/// Vocabulary and target strategy for one task split.
#[derive(Debug, Clone)]
pub struct TaskProfile {
    pub task: TaskType,
    pub favored: StrategyId,
    pub keyword_syllables: Vec<String>,
    pub filler_syllables: Vec<String>,
}

fn syllables(consonants: &str, vowels: &str) -> Vec<String> {
    let mut out = Vec::new();
    for c in consonants.chars() {
        for v in vowels.chars() {
            out.push(format!("{c}{v}"));
        }
    }
    out
}

impl TaskProfile {
    /// The three default splits. Keyword syllables and filler syllables
    /// draw from disjoint letters, and neither letter set can spell a
    /// stopword, wh-word or auxiliary.
    pub fn standard() -> Vec<TaskProfile> {
        let keyword = syllables("bdgkmnprtz", "aio");
        let filler = syllables("cfhjlsvwxy", "eu");
        [
            (TaskType::Direct, StrategyId::Dense),
            (TaskType::MultiHop, StrategyId::HybridRrf),
            (TaskType::Scientific, StrategyId::HybridRrf),
        ]
        .into_iter()
        .map(|(task, favored)| TaskProfile {
            task,
            favored,
            keyword_syllables: keyword.clone(),
            filler_syllables: filler.clone(),
        })
        .collect()
    }
}

/// What to generate: the seed fixes every byte of the output.
#[derive(Debug, Clone)]
pub struct BenchmarkSpec {
    pub seed: u64,
    pub queries_per_task: usize,
    pub docs_per_task: usize,
    pub profiles: Vec<TaskProfile>,
}

impl Default for BenchmarkSpec {
    fn default() -> Self {
        BenchmarkSpec {
            seed: 7,
            queries_per_task: 40,
            docs_per_task: 300,
            profiles: TaskProfile::standard(),
        }
    }
}

impl BenchmarkSpec {
    pub fn with_seed(seed: u64) -> Self {
        BenchmarkSpec {
            seed,
            ..BenchmarkSpec::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.queries_per_task < 10 || self.docs_per_task < 10 {
            return Err(Error::Invalid(
                "benchmark sizes must be at least 10 per task".to_string(),
            ));
        }
        if self.docs_per_task < 4 * self.queries_per_task {
            return Err(Error::Invalid(format!(
                "need at least {} docs per task for {} queries",
                4 * self.queries_per_task,
                self.queries_per_task
            )));
        }
        if self.profiles.is_empty() {
            return Err(Error::Invalid("no task profiles".to_string()));
        }
        Ok(())
    }
}

/// Where the generated files landed.
#[derive(Debug)]
pub struct GeneratedBenchmark {
    pub root: PathBuf,
    pub manifest: PathBuf,
    pub task_dirs: Vec<(TaskType, PathBuf)>,
}

struct TaskFiles {
    docs: Vec<Document>,
    queries: Vec<QueryRecord>,
    qrels: RelevanceJudgments,
}

fn fresh_filler(
    rng: &mut ChaCha8Rng,
    syllables: &[String],
    used: &mut HashSet<String>,
) -> String {
    loop {
        let a = rng.gen_range(0..syllables.len());
        let b = rng.gen_range(0..syllables.len());
        let word = format!("{}{}", syllables[a], syllables[b]);
        if used.insert(word.clone()) {
            return word;
        }
    }
}

/// Draws `count` keywords whose syllables are pairwise distinct, so no
/// two keyword trigrams of one query coincide. Words are also unique
/// across the whole task.
fn query_keywords(
    rng: &mut ChaCha8Rng,
    syllables: &[String],
    used: &mut HashSet<String>,
    count: usize,
) -> Vec<String> {
    loop {
        let picks = index::sample(rng, syllables.len(), 2 * count);
        let words: Vec<String> = (0..count)
            .map(|i| {
                format!(
                    "{}{}",
                    syllables[picks.index(2 * i)],
                    syllables[picks.index(2 * i + 1)]
                )
            })
            .collect();
        if words.iter().all(|w| !used.contains(w)) {
            used.extend(words.iter().cloned());
            return words;
        }
    }
}

fn variant(word: &str, suffix: &str) -> String {
    format!("{word}{suffix}")
}

fn pick_fillers(rng: &mut ChaCha8Rng, pool: &[String], n: usize) -> Vec<String> {
    index::sample(rng, pool.len(), n)
        .into_iter()
        .map(|i| pool[i].clone())
        .collect()
}

fn doc(id: String, tokens: Vec<String>) -> Document {
    Document {
        doc_id: id,
        title: String::new(),
        text: tokens.join(" "),
    }
}

fn sim(query_vec: &[f64], tokens: &[String], dim: usize) -> f64 {
    let doc_vec = embed_text(&tokens.join(" "), dim).expect("valid benchmark dim");
    cosine(query_vec, &doc_vec)
}

fn generate_task(profile: &TaskProfile, spec: &BenchmarkSpec, stream: u64) -> Result<TaskFiles> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(stream);
    let task = profile.task;
    let name = task.name();
    let dim = PoolConfig::default().embed_dim;

    let mut used = HashSet::new();
    let filler_pool: Vec<String> = (0..FILLER_POOL_SIZE)
        .map(|_| fresh_filler(&mut rng, &profile.filler_syllables, &mut used))
        .collect();

    let mut docs = Vec::new();
    let mut queries = Vec::new();
    let mut qrels = RelevanceJudgments::new();

    let engineered_per_query = if task == TaskType::Direct { 3 } else { 4 };
    for qi in 0..spec.queries_per_task {
        let query_id = format!("{name}-q{qi:03}");

        if task == TaskType::Direct {
            let mut accepted = None;
            for _ in 0..MAX_DRAWS {
                let kws = query_keywords(&mut rng, &profile.keyword_syllables, &mut used, 3);

                let mut relevant = kws.clone();
                for kw in &kws {
                    for suffix in RELEVANT_SUFFIXES {
                        relevant.push(variant(kw, suffix));
                    }
                }
                relevant.extend(pick_fillers(&mut rng, &filler_pool, 8));
                let mut decoy_strong: Vec<String> = Vec::new();
                for kw in &kws {
                    decoy_strong.extend(std::iter::repeat(kw.clone()).take(4));
                }
                decoy_strong.extend(pick_fillers(&mut rng, &filler_pool, 68));
                let mut decoy_mild: Vec<String> = Vec::new();
                for kw in &kws {
                    decoy_mild.extend(std::iter::repeat(kw.clone()).take(2));
                }
                decoy_mild.extend(pick_fillers(&mut rng, &filler_pool, 34));

                let query_vec = embed_text(&kws.join(" "), dim)?;
                let rel = sim(&query_vec, &relevant, dim);
                let strong = sim(&query_vec, &decoy_strong, dim);
                let mild = sim(&query_vec, &decoy_mild, dim);
                if rel >= strong + DENSE_GAP && rel >= mild + DENSE_GAP {
                    accepted = Some((kws, relevant, decoy_strong, decoy_mild));
                    break;
                }
            }
            let Some((kws, relevant, decoy_strong, decoy_mild)) = accepted else {
                return Err(Error::Invalid(format!(
                    "{query_id}: no draw met the dense separation gap"
                )));
            };

            let rel_id = format!("{query_id}-rel");
            docs.push(doc(rel_id.clone(), relevant));
            docs.push(doc(format!("{query_id}-lex1"), decoy_strong));
            docs.push(doc(format!("{query_id}-lex2"), decoy_mild));
            qrels.insert(&query_id, &rel_id, 1);
            queries.push(query(task, query_id, kws.join(" ")));
        } else {
            let mut accepted = None;
            for _ in 0..MAX_DRAWS {
                let kws = query_keywords(&mut rng, &profile.keyword_syllables, &mut used, 4);

                let mut relevant = vec![
                    kws[0].clone(),
                    kws[1].clone(),
                    variant(&kws[2], "s"),
                    variant(&kws[3], "s"),
                ];
                relevant.extend(pick_fillers(&mut rng, &filler_pool, 4));
                let mut lexical: Vec<String> = Vec::new();
                for kw in &kws {
                    lexical.extend(std::iter::repeat(kw.clone()).take(2));
                }
                lexical.extend(pick_fillers(&mut rng, &filler_pool, 82));
                // Alternating prefix and next-keyword suffix variants
                // restore the query's token-boundary trigrams without any
                // exact term, which is what lifts the carrier above the
                // relevant doc under cosine.
                let mut carrier: Vec<String> = Vec::new();
                for i in 0..kws.len() {
                    carrier.push(format!("x{}", kws[i]));
                    carrier.push(variant(&kws[(i + 1) % kws.len()], "s"));
                }
                let mut buffer: Vec<String> = Vec::new();
                for kw in &kws {
                    for suffix in BUFFER_SUFFIXES {
                        buffer.push(variant(kw, suffix));
                    }
                }
                buffer.extend(pick_fillers(&mut rng, &filler_pool, 12));

                let query_vec = embed_text(&kws.join(" "), dim)?;
                let rel = sim(&query_vec, &relevant, dim);
                let lex = sim(&query_vec, &lexical, dim);
                let car = sim(&query_vec, &carrier, dim);
                let buf = sim(&query_vec, &buffer, dim);
                if car >= rel + DENSE_GAP && rel >= buf + DENSE_GAP && buf >= lex + DENSE_GAP {
                    accepted = Some((kws, relevant, lexical, carrier, buffer));
                    break;
                }
            }
            let Some((kws, relevant, lexical, carrier, buffer)) = accepted else {
                return Err(Error::Invalid(format!(
                    "{query_id}: no draw met the dense separation gap"
                )));
            };

            let rel_id = format!("{query_id}-rel");
            docs.push(doc(rel_id.clone(), relevant));
            docs.push(doc(format!("{query_id}-lex"), lexical));
            docs.push(doc(format!("{query_id}-var1"), carrier));
            docs.push(doc(format!("{query_id}-var2"), buffer));
            qrels.insert(&query_id, &rel_id, 1);
            queries.push(query(task, query_id, kws.join(" ")));
        }
    }

    let engineered = engineered_per_query * spec.queries_per_task;
    let background = spec.docs_per_task.saturating_sub(engineered);
    for bi in 0..background {
        let len = rng.gen_range(30..=50);
        let tokens = pick_fillers(&mut rng, &filler_pool, len);
        docs.push(doc(format!("{name}-bg{bi:04}"), tokens));
    }

    Ok(TaskFiles {
        docs,
        queries,
        qrels,
    })
}

fn query(task: TaskType, query_id: String, text: String) -> QueryRecord {
    let mut record = QueryRecord {
        query_id,
        text,
        ..QueryRecord::default()
    };
    record
        .metadata
        .insert("task_type".to_string(), task.name().to_string());
    record
}

/// Evaluates every fixed strategy on one freshly generated split and
/// returns the favored strategy's nDCG lead over the best of the rest.
/// Per-query redraws bound cosine noise within a query's own documents,
/// but documents from other queries still share the syllable pool, so
/// the realized ordering is confirmed against the whole split here.
fn split_margin(profile: &TaskProfile, files: &TaskFiles, cfg: &Config) -> Result<f64> {
    let pool = RetrieverPool::build(files.docs.clone(), PoolConfig::from_config(cfg))?;
    let dataset = Dataset {
        name: profile.task.name().to_string(),
        pool,
        queries: files.queries.clone(),
        qrels: files.qrels.clone(),
    };
    let memory = ExperienceMemory::new();
    let mut favored = 0.0f64;
    let mut best_other = 0.0f64;
    for strategy in StrategyId::ALL {
        let result = evaluate_method(
            RunMethod::Fixed(strategy),
            std::slice::from_ref(&dataset),
            cfg,
            &memory,
            MEASURE_K,
        )?;
        if strategy == profile.favored {
            favored = result.overall.ndcg_at_k;
        } else {
            best_other = best_other.max(result.overall.ndcg_at_k);
        }
    }
    let margin = favored - best_other;
    if margin < MIN_MARGIN {
        return Err(Error::Invalid(format!(
            "{} split: {} leads by {margin:.4}, under the {MIN_MARGIN} floor",
            profile.task.name(),
            profile.favored
        )));
    }
    Ok(margin)
}

/// Generates the full benchmark tree under `out`: one directory per
/// task with corpus, queries and qrels files, plus a manifest naming
/// the strategy each split favors and its measured nDCG lead over the
/// best other fixed strategy under the default configuration.
pub fn generate_benchmark(spec: &BenchmarkSpec, out: &Path) -> Result<GeneratedBenchmark> {
    spec.validate()?;
    fs::create_dir_all(out).map_err(|source| Error::Io {
        path: out.to_path_buf(),
        source,
    })?;

    let cfg = Config::default();
    let mut manifest = String::from("task\tfavored\tmargin\n");
    let mut task_dirs = Vec::new();

    for (idx, profile) in spec.profiles.iter().enumerate() {
        let files = generate_task(profile, spec, idx as u64)?;
        let margin = split_margin(profile, &files, &cfg)?;
        let dir = out.join(profile.task.name());
        fs::create_dir_all(&dir).map_err(|source| Error::Io {
            path: dir.clone(),
            source,
        })?;
        save_corpus(&files.docs, &dir.join(CORPUS_FILE))?;
        save_queries(&files.queries, &dir.join(QUERIES_FILE))?;
        save_qrels(&files.qrels, &dir.join(QRELS_FILE))?;
        let _ = writeln!(
            manifest,
            "{}\t{}\t{margin:.4}",
            profile.task.name(),
            profile.favored
        );
        task_dirs.push((profile.task, dir));
    }

    let manifest_path = out.join(MANIFEST_FILE);
    fs::write(&manifest_path, manifest).map_err(|source| Error::Io {
        path: manifest_path.clone(),
        source,
    })?;
    Ok(GeneratedBenchmark {
        root: out.to_path_buf(),
        manifest: manifest_path,
        task_dirs,
    })
}

/// Loads a generated benchmark tree back as evaluation datasets, in
/// manifest order.
pub fn load_benchmark(root: &Path, cfg: &Config) -> Result<Vec<Dataset>> {
    let manifest_path = root.join(MANIFEST_FILE);
    let manifest = fs::read_to_string(&manifest_path).map_err(|source| Error::Io {
        path: manifest_path.clone(),
        source,
    })?;
    let mut datasets = Vec::new();
    for (idx, line) in manifest.lines().enumerate() {
        if idx == 0 || line.trim().is_empty() {
            continue;
        }
        let task = line.split('\t').next().unwrap_or_default();
        if task.is_empty() {
            return Err(Error::Malformed {
                path: manifest_path.clone(),
                line: idx + 1,
                message: "missing task name".to_string(),
            });
        }
        let dir = root.join(task);
        let docs = load_corpus(&dir.join(CORPUS_FILE))?;
        let queries = load_queries(&dir.join(QUERIES_FILE))?;
        let (qrels, _warnings) = load_qrels(&dir.join(QRELS_FILE))?;
        let pool = RetrieverPool::build(docs, PoolConfig::from_config(cfg))?;
        datasets.push(Dataset {
            name: task.to_string(),
            pool,
            queries,
            qrels,
        });
    }
    if datasets.is_empty() {
        return Err(Error::Invalid(format!(
            "{} lists no tasks",
            manifest_path.display()
        )));
    }
    Ok(datasets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::router::RoutingPolicy;

    fn small_spec(seed: u64) -> BenchmarkSpec {
        BenchmarkSpec {
            seed,
            queries_per_task: 10,
            docs_per_task: 40,
            profiles: TaskProfile::standard(),
        }
    }

    fn tree_bytes(root: &Path) -> Vec<(String, Vec<u8>)> {
        let mut files = vec![(
            MANIFEST_FILE.to_string(),
            fs::read(root.join(MANIFEST_FILE)).unwrap(),
        )];
        for task in ["direct", "multi_hop", "scientific"] {
            for file in [CORPUS_FILE, QUERIES_FILE, QRELS_FILE] {
                let rel = format!("{task}/{file}");
                files.push((rel.clone(), fs::read(root.join(&rel)).unwrap()));
            }
        }
        files
    }

    #[test]
    fn same_seed_produces_byte_identical_trees() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a");
        let b = dir.path().join("b");
        generate_benchmark(&small_spec(7), &a).unwrap();
        generate_benchmark(&small_spec(7), &b).unwrap();
        assert_eq!(tree_bytes(&a), tree_bytes(&b));
    }

    #[test]
    fn different_seeds_differ() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a");
        let b = dir.path().join("b");
        generate_benchmark(&small_spec(7), &a).unwrap();
        generate_benchmark(&small_spec(8), &b).unwrap();
        assert_ne!(tree_bytes(&a), tree_bytes(&b));
    }

    #[test]
    fn generated_files_pass_ingest_cleanly() {
        let dir = tempfile::tempdir().unwrap();
        let out = generate_benchmark(&small_spec(7), dir.path()).unwrap();
        assert_eq!(out.task_dirs.len(), 3);
        for (_task, task_dir) in &out.task_dirs {
            let docs = load_corpus(&task_dir.join(CORPUS_FILE)).unwrap();
            let queries = load_queries(&task_dir.join(QUERIES_FILE)).unwrap();
            let (qrels, warnings) = load_qrels(&task_dir.join(QRELS_FILE)).unwrap();
            assert_eq!(docs.len(), 40);
            assert_eq!(queries.len(), 10);
            assert!(warnings.is_empty());
            assert!(qrels.dangling_doc_ids(&docs).is_empty());
            for q in &queries {
                assert!(q.metadata.contains_key("task_type"));
            }
        }
        let manifest = fs::read_to_string(&out.manifest).unwrap();
        let rows: Vec<&str> = manifest.lines().skip(1).collect();
        assert_eq!(rows.len(), 3);
        for row in rows {
            let cols: Vec<&str> = row.split('\t').collect();
            assert_eq!(cols.len(), 3);
            assert!(matches!(cols[1], "dense" | "hybrid_rrf"));
            let margin: f64 = cols[2].parse().unwrap();
            assert!(margin >= MIN_MARGIN, "manifest margin {margin}");
        }
    }

    #[test]
    fn degenerate_specs_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let mut spec = small_spec(7);
        spec.queries_per_task = 5;
        assert!(generate_benchmark(&spec, dir.path()).is_err());
        let mut spec = small_spec(7);
        spec.docs_per_task = 30;
        assert!(generate_benchmark(&spec, dir.path()).is_err());
        let mut spec = small_spec(7);
        spec.profiles.clear();
        assert!(generate_benchmark(&spec, dir.path()).is_err());
    }

    #[test]
    fn each_split_is_won_by_its_engineered_strategy() {
        let dir = tempfile::tempdir().unwrap();
        generate_benchmark(&small_spec(7), dir.path()).unwrap();
        let cfg = Config::default();
        let datasets = load_benchmark(dir.path(), &cfg).unwrap();
        let memory = ExperienceMemory::new();
        let ndcg = |method: RunMethod, ds: &Dataset| {
            evaluate_method(method, std::slice::from_ref(ds), &cfg, &memory, 10)
                .unwrap()
                .overall
                .ndcg_at_k
        };
        for ds in &datasets {
            let dense = ndcg(RunMethod::Fixed(StrategyId::Dense), ds);
            let hybrid = ndcg(RunMethod::Fixed(StrategyId::HybridRrf), ds);
            let bm25 = ndcg(RunMethod::Fixed(StrategyId::Bm25), ds);
            if ds.name == "direct" {
                assert!((dense - 1.0).abs() < 1e-9, "direct dense {dense}");
                assert!(dense >= hybrid + 0.02, "direct {dense} vs hybrid {hybrid}");
                assert!(dense >= bm25 + 0.02, "direct {dense} vs bm25 {bm25}");
            } else {
                assert!((hybrid - 1.0).abs() < 1e-9, "{} hybrid {hybrid}", ds.name);
                assert!(hybrid >= dense + 0.02, "{} {hybrid} vs dense {dense}", ds.name);
                assert!(hybrid >= bm25 + 0.02, "{} {hybrid} vs bm25 {bm25}", ds.name);
            }
        }
    }

    #[test]
    fn rule_routed_skill_dominates_the_pooled_mixture() {
        let dir = tempfile::tempdir().unwrap();
        generate_benchmark(&small_spec(7), dir.path()).unwrap();
        let cfg = Config::default();
        let datasets = load_benchmark(dir.path(), &cfg).unwrap();
        let memory = ExperienceMemory::new();
        let skill = evaluate_method(
            RunMethod::Skill(RoutingPolicy::Rule),
            &datasets,
            &cfg,
            &memory,
            10,
        )
        .unwrap();
        for strategy in StrategyId::ALL {
            let fixed =
                evaluate_method(RunMethod::Fixed(strategy), &datasets, &cfg, &memory, 10).unwrap();
            assert!(
                skill.overall.ndcg_at_k >= fixed.overall.ndcg_at_k + 0.005,
                "{strategy}: skill {} vs fixed {}",
                skill.overall.ndcg_at_k,
                fixed.overall.ndcg_at_k
            );
        }
    }
}
