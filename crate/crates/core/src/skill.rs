//! Agent-facing entry point: analyze the request, pick a strategy, run
//! it, and hand back packaged evidence.
//!
//! The skill never writes to experience memory on the serving path;
//! feedback is recorded explicitly once per-strategy scores exist.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::memory::{make_record, ExperienceMemory};
use crate::pool::{RankedList, RetrieverPool, StrategyId};
use crate::router::{Router, RoutingDecision, RoutingPolicy};
use crate::scene::{SceneAnalyzer, SceneFeatures, SkillRequest};

/// Longest snippet, in characters, before the ellipsis.
const SNIPPET_LIMIT: usize = 300;

/// One retrieved document as handed to the caller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceItem {
    pub doc_id: String,
    pub rank: usize,
    pub score: f64,
    pub title: String,
    pub snippet: String,
}

/// Everything the caller gets back from one invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalPackage {
    pub query_id: String,
    pub scene: SceneFeatures,
    pub decision: RoutingDecision,
    pub evidence: Vec<EvidenceItem>,
    pub elapsed: Duration,
    pub pool_version: String,
}

impl RetrievalPackage {
    /// Equality that ignores the wall-clock field, for determinism
    /// checks.
    pub fn same_output(&self, other: &RetrievalPackage) -> bool {
        self.query_id == other.query_id
            && self.scene == other.scene
            && self.decision == other.decision
            && self.evidence == other.evidence
            && self.pool_version == other.pool_version
    }
}

/// Truncates to at most 300 characters without splitting a word, adding
/// an ellipsis when anything was cut.
pub fn make_snippet(text: &str) -> String {
    let total = text.chars().count();
    if total <= SNIPPET_LIMIT {
        return text.to_string();
    }
    let head: String = text.chars().take(SNIPPET_LIMIT).collect();
    let boundary_cut = text
        .chars()
        .nth(SNIPPET_LIMIT)
        .map_or(true, char::is_whitespace);
    let kept = if boundary_cut {
        head.trim_end()
    } else {
        match head.rfind(char::is_whitespace) {
            Some(pos) => head[..pos].trim_end(),
            None => head.as_str(),
        }
    };
    format!("{kept}\u{2026}")
}

/// The orchestrator: one retriever pool, one analyzer, one router, one
/// experience store.
#[derive(Debug)]
pub struct Skill {
    pool: RetrieverPool,
    analyzer: SceneAnalyzer,
    router: Router,
    memory: ExperienceMemory,
}

impl Skill {
    pub fn new(pool: RetrieverPool, cfg: &Config) -> Result<Skill> {
        Skill::with_memory(pool, cfg, ExperienceMemory::new())
    }

    pub fn with_memory(
        pool: RetrieverPool,
        cfg: &Config,
        memory: ExperienceMemory,
    ) -> Result<Skill> {
        Ok(Skill {
            pool,
            analyzer: SceneAnalyzer::from_config(cfg)?,
            router: Router::from_config(cfg),
            memory,
        })
    }

    pub fn pool(&self) -> &RetrieverPool {
        &self.pool
    }

    pub fn memory(&self) -> &ExperienceMemory {
        &self.memory
    }

    pub fn memory_mut(&mut self) -> &mut ExperienceMemory {
        &mut self.memory
    }

    pub fn analyzer(&self) -> &SceneAnalyzer {
        &self.analyzer
    }

    pub fn router(&self) -> &Router {
        &self.router
    }

    pub fn analyze(&self, request: &SkillRequest) -> SceneFeatures {
        self.analyzer.analyze(request)
    }

    pub fn route(&self, policy: RoutingPolicy, scene: &SceneFeatures) -> RoutingDecision {
        self.router.route(policy, scene, &self.memory)
    }

    /// The full pipeline: analyze, route, execute, package. Errors carry
    /// the query id.
    pub fn invoke(
        &self,
        request: &SkillRequest,
        policy: RoutingPolicy,
        k: usize,
    ) -> Result<RetrievalPackage> {
        let started = Instant::now();
        let scene = self.analyze(request);
        let decision = self.route(policy, &scene);
        let hits = self
            .pool
            .execute_for_query(decision.strategy, &request.query, k)
            .map_err(|e| e.for_query(&request.query.query_id))?;
        self.package_result(
            &request.query.query_id,
            scene,
            decision,
            &hits,
            started.elapsed(),
        )
        .map_err(|e| e.for_query(&request.query.query_id))
    }

    /// Turns ranked hits into evidence items, resolving documents by id.
    pub fn package_result(
        &self,
        query_id: &str,
        scene: SceneFeatures,
        decision: RoutingDecision,
        hits: &RankedList,
        elapsed: Duration,
    ) -> Result<RetrievalPackage> {
        debug_assert!(
            hits.hits.iter().all(|h| h.strategy == decision.strategy),
            "hits were produced by a different strategy than the decision"
        );
        let mut evidence = Vec::with_capacity(hits.len());
        for hit in &hits.hits {
            let doc = self
                .pool
                .document(&hit.doc_id)
                .ok_or_else(|| Error::UnknownDoc(hit.doc_id.clone()))?;
            evidence.push(EvidenceItem {
                doc_id: doc.doc_id.clone(),
                rank: hit.rank,
                score: hit.score,
                title: doc.title.clone(),
                snippet: make_snippet(&doc.text),
            });
        }
        Ok(RetrievalPackage {
            query_id: query_id.to_string(),
            scene,
            decision,
            evidence,
            elapsed,
            pool_version: self.pool.version().to_string(),
        })
    }

    /// Stores one experience record built from per-strategy quality
    /// scores. Rejected scores leave memory untouched.
    pub fn record_feedback(
        &mut self,
        scene: &SceneFeatures,
        scores: &BTreeMap<StrategyId, f64>,
    ) -> Result<()> {
        let record = make_record(scene, scores)?;
        self.memory.append(record)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, QueryRecord};
    use crate::pool::PoolConfig;
    use crate::scene::TaskType;
    use proptest::prelude::*;

    fn docs() -> Vec<Document> {
        vec![
            Document {
                doc_id: "d1".into(),
                title: "Paris".into(),
                text: "Paris is the capital of France.".into(),
            },
            Document {
                doc_id: "d2".into(),
                title: "Berlin".into(),
                text: "Berlin is the capital of Germany.".into(),
            },
            Document {
                doc_id: "d3".into(),
                title: "Rivers".into(),
                text: "The Seine flows through Paris toward the sea.".into(),
            },
        ]
    }

    fn skill() -> Skill {
        let pool = RetrieverPool::build(docs(), PoolConfig::default()).unwrap();
        Skill::new(pool, &Config::default()).unwrap()
    }

    fn request(text: &str) -> SkillRequest {
        SkillRequest::from_query(QueryRecord {
            query_id: "q1".into(),
            text: text.into(),
            ..QueryRecord::default()
        })
    }

    #[test]
    fn direct_metadata_routes_to_dense_under_rule_policy() {
        let mut req = request("capital of France?");
        req.metadata.insert("task_type".into(), "direct".into());
        let pkg = skill().invoke(&req, RoutingPolicy::Rule, 10).unwrap();
        assert_eq!(pkg.decision.strategy, StrategyId::Dense);
        assert_eq!(pkg.query_id, "q1");
        assert!(!pkg.evidence.is_empty());
    }

    #[test]
    fn invoke_equals_the_composed_pipeline() {
        let s = skill();
        let req = request("which river that flows through Paris reaches the sea?");
        let pkg = s.invoke(&req, RoutingPolicy::Rule, 5).unwrap();
        let scene = s.analyze(&req);
        let decision = s.route(RoutingPolicy::Rule, &scene);
        let hits = s
            .pool()
            .execute_for_query(decision.strategy, &req.query, 5)
            .unwrap();
        let composed = s
            .package_result("q1", scene, decision, &hits, Duration::ZERO)
            .unwrap();
        assert!(pkg.same_output(&composed));
    }

    #[test]
    fn repeated_invocations_differ_only_in_elapsed() {
        let s = skill();
        let req = request("capital of France?");
        let a = s.invoke(&req, RoutingPolicy::AdaptiveStyle, 10).unwrap();
        let b = s.invoke(&req, RoutingPolicy::AdaptiveStyle, 10).unwrap();
        assert!(a.same_output(&b));
    }

    #[test]
    fn unmatched_query_yields_an_empty_but_valid_package() {
        let s = skill();
        let pkg = s.invoke(&request("zz"), RoutingPolicy::Rule, 10).unwrap();
        assert!(pkg.evidence.is_empty());
        assert_eq!(pkg.pool_version, s.pool().version());
    }

    #[test]
    fn evidence_is_rank_ordered_and_capped_at_k() {
        let s = skill();
        let pkg = s
            .invoke(&request("the capital of?"), RoutingPolicy::Rule, 2)
            .unwrap();
        assert!(pkg.evidence.len() <= 2);
        for (i, item) in pkg.evidence.iter().enumerate() {
            assert_eq!(item.rank, i + 1);
        }
        for pair in pkg.evidence.windows(2) {
            assert!(pair[0].score >= pair[1].score);
        }
    }

    #[test]
    fn unknown_doc_in_hits_is_reported() {
        let s = skill();
        let mut hits = s.pool().execute(StrategyId::Bm25, "capital", 5).unwrap();
        hits.hits[0].doc_id = "ghost".into();
        let scene = s.analyze(&request("capital"));
        let decision = RoutingDecision {
            strategy: StrategyId::Bm25,
            policy: RoutingPolicy::Rule,
            confidence: 1.0,
            explanation: "forced for the test".into(),
        };
        let err = s.package_result("q1", scene, decision, &hits, Duration::ZERO);
        assert!(matches!(err, Err(Error::UnknownDoc(id)) if id == "ghost"));
    }

    #[test]
    fn feedback_grows_memory_and_invalid_scores_leave_it_untouched() {
        let mut s = skill();
        let scene = s.analyze(&request("capital of France?"));
        let mut scores = BTreeMap::new();
        for strategy in StrategyId::ALL {
            scores.insert(strategy, 0.5);
        }
        s.record_feedback(&scene, &scores).unwrap();
        assert_eq!(s.memory().len(), 1);
        assert_eq!(s.memory().records()[0].score_vector.len(), 4);

        scores.insert(StrategyId::Bm25, 1.2);
        assert!(s.record_feedback(&scene, &scores).is_err());
        assert_eq!(s.memory().len(), 1);
    }

    #[test]
    fn two_instances_produce_identical_packages() {
        let a = skill();
        let b = skill();
        let req = request("what is the capital of France?");
        for policy in [RoutingPolicy::Rule, RoutingPolicy::Knn, RoutingPolicy::Regress] {
            let pa = a.invoke(&req, policy, 10).unwrap();
            let pb = b.invoke(&req, policy, 10).unwrap();
            assert!(pa.same_output(&pb), "policy {policy}");
        }
    }

    #[test]
    fn learned_policies_consult_the_skill_memory() {
        let mut s = skill();
        let mut req = request("capital of France?");
        req.metadata.insert("task_type".into(), "direct".into());
        let scene = s.analyze(&req);
        let mut scores = BTreeMap::new();
        scores.insert(StrategyId::Bm25, 0.9);
        scores.insert(StrategyId::Dense, 0.1);
        s.record_feedback(&scene, &scores).unwrap();
        let pkg = s.invoke(&req, RoutingPolicy::Knn, 10).unwrap();
        assert_eq!(pkg.decision.strategy, StrategyId::Bm25);
    }

    // ---- snippets ---------------------------------------------------------

    #[test]
    fn short_text_passes_through_without_ellipsis() {
        let text = "Paris is the capital of France.";
        assert_eq!(make_snippet(text), text);
    }

    #[test]
    fn exactly_three_hundred_chars_pass_through() {
        let text = "x".repeat(300);
        assert_eq!(make_snippet(&text), text);
    }

    #[test]
    fn long_text_is_cut_at_a_word_boundary() {
        let text = "word ".repeat(100);
        let snippet = make_snippet(&text);
        assert!(snippet.ends_with('\u{2026}'));
        assert!(snippet.chars().count() <= 301);
        let body = snippet.trim_end_matches('\u{2026}');
        assert!(body.ends_with("word"), "cut mid-word: {body:?}");
    }

    #[test]
    fn cut_never_splits_a_word() {
        // 300 chars land inside "boundary"; the snippet must back up.
        let filler = "a ".repeat(148);
        let text = format!("{filler}boundary tail");
        assert_eq!(text.chars().take(300).count(), 300);
        let snippet = make_snippet(&text);
        let body = snippet.trim_end_matches('\u{2026}');
        assert!(!body.ends_with("boundar"), "split word: {body:?}");
    }

    #[test]
    fn unbroken_text_falls_back_to_a_hard_cut() {
        let text = "y".repeat(400);
        let snippet = make_snippet(&text);
        assert_eq!(snippet.chars().count(), 301);
        assert!(snippet.ends_with('\u{2026}'));
    }

    #[test]
    fn snippet_counts_characters_not_bytes() {
        let text = "é".repeat(350);
        let snippet = make_snippet(&text);
        assert_eq!(snippet.chars().count(), 301);
    }

    proptest! {
        #[test]
        fn snippets_never_exceed_301_chars(text in ".{0,600}") {
            let snippet = make_snippet(&text);
            prop_assert!(snippet.chars().count() <= 301);
            let total = text.chars().count();
            if total <= 300 {
                prop_assert_eq!(snippet, text);
            } else {
                let ellipsis = '\u{2026}';
                prop_assert!(snippet.ends_with(ellipsis));
            }
        }
    }

    #[test]
    fn rule_policy_never_touches_memory() {
        let mut s = skill();
        let mut req = request("capital of France?");
        req.metadata.insert("task_type".into(), "direct".into());
        let scene = s.analyze(&req);
        let mut scores = BTreeMap::new();
        scores.insert(StrategyId::Bm25, 1.0);
        s.record_feedback(&scene, &scores).unwrap();
        let pkg = s.invoke(&req, RoutingPolicy::Rule, 10).unwrap();
        assert_eq!(pkg.decision.strategy, StrategyId::Dense);
        assert_eq!(pkg.scene.task_type, TaskType::Direct);
    }
}
