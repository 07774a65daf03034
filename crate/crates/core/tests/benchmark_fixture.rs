//! Pins the default-seed benchmark: a digest over every generated byte,
//! and the evaluation run that confirmed the engineered per-split
//! orderings, committed under `tests/fixtures/`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use exprag_core::eval::evaluate_method;
use exprag_core::synth::{generate_benchmark, load_benchmark, BenchmarkSpec, MANIFEST_FILE};
use exprag_core::{Config, ExperienceMemory, RoutingPolicy, RunMethod, StrategyId};

const TREE_SHA256: &str = "26bce665dd313ccd8502575bdfae32ddd3e0cd0d8a499f49fab29648a6f1e660";
const CONFIRMING_RUN: &str = include_str!("fixtures/default_benchmark_ndcg.tsv");

fn tree_digest(root: &Path, tasks: &[String]) -> String {
    let mut hasher = Sha256::new();
    let mut feed = |rel: String| {
        hasher.update(rel.as_bytes());
        hasher.update([b'\n']);
        hasher.update(fs::read(root.join(&rel)).unwrap());
    };
    feed(MANIFEST_FILE.to_string());
    for task in tasks {
        for file in ["corpus.jsonl", "queries.jsonl", "qrels.tsv"] {
            feed(format!("{task}/{file}"));
        }
    }
    format!("{:x}", hasher.finalize())
}

#[test]
fn default_seed_matches_the_committed_pins() {
    let dir = tempfile::tempdir().unwrap();
    generate_benchmark(&BenchmarkSpec::default(), dir.path()).unwrap();
    let cfg = Config::default();
    let datasets = load_benchmark(dir.path(), &cfg).unwrap();
    let tasks: Vec<String> = datasets.iter().map(|d| d.name.clone()).collect();

    let digest = tree_digest(dir.path(), &tasks);

    let memory = ExperienceMemory::new();
    let methods = [
        RunMethod::Skill(RoutingPolicy::Rule),
        RunMethod::Fixed(StrategyId::Bm25),
        RunMethod::Fixed(StrategyId::RewriteBm25),
        RunMethod::Fixed(StrategyId::Dense),
        RunMethod::Fixed(StrategyId::HybridRrf),
    ];
    let mut run = String::from("split\tmethod\tndcg@10\n");
    for method in methods {
        let result = evaluate_method(method, &datasets, &cfg, &memory, 10).unwrap();
        for (split, metrics) in &result.per_dataset {
            let _ = writeln!(run, "{split}\t{method}\t{:.9}", metrics.ndcg_at_k);
        }
        let _ = writeln!(run, "overall\t{method}\t{:.9}", result.overall.ndcg_at_k);
    }

    assert_eq!(
        digest, TREE_SHA256,
        "generated tree drifted; actual digest above, confirming run:\n{run}"
    );
    assert_eq!(
        run, CONFIRMING_RUN,
        "evaluation drifted from the committed confirming run"
    );
}
