//! Picks a retrieval strategy for an analyzed scene.
//!
//! Four policies are available: a fixed rule table, nearest-neighbor
//! voting over stored experience, score regression over the same
//! neighbors, and a complexity threshold. The learned policies fall back
//! to the rule table when memory is empty.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::memory::ExperienceMemory;
use crate::pool::StrategyId;
use crate::scene::{SceneFeatures, TaskType};

/// How the strategy choice is made.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoutingPolicy {
    Rule,
    Knn,
    Regress,
    AdaptiveStyle,
}

impl RoutingPolicy {
    pub const ALL: [RoutingPolicy; 4] = [
        RoutingPolicy::Rule,
        RoutingPolicy::Knn,
        RoutingPolicy::Regress,
        RoutingPolicy::AdaptiveStyle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RoutingPolicy::Rule => "rule",
            RoutingPolicy::Knn => "knn",
            RoutingPolicy::Regress => "regress",
            RoutingPolicy::AdaptiveStyle => "adaptive_style",
        }
    }
}

impl fmt::Display for RoutingPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RoutingPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<RoutingPolicy> {
        match s {
            "rule" => Ok(RoutingPolicy::Rule),
            "knn" => Ok(RoutingPolicy::Knn),
            "regress" => Ok(RoutingPolicy::Regress),
            "adaptive_style" => Ok(RoutingPolicy::AdaptiveStyle),
            other => Err(Error::UnknownPolicy(other.to_string())),
        }
    }
}

/// The chosen strategy plus how and why it was chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutingDecision {
    pub strategy: StrategyId,
    pub policy: RoutingPolicy,
    pub confidence: f64,
    pub explanation: String,
}

/// Stateless dispatcher configured with the neighbor count and the
/// complexity threshold.
#[derive(Debug, Clone)]
pub struct Router {
    knn_k: usize,
    adaptive_threshold: f64,
}

impl Router {
    pub fn from_config(cfg: &Config) -> Router {
        Router {
            knn_k: cfg.knn_k,
            adaptive_threshold: cfg.adaptive_threshold,
        }
    }

    pub fn route(
        &self,
        policy: RoutingPolicy,
        scene: &SceneFeatures,
        memory: &ExperienceMemory,
    ) -> RoutingDecision {
        match policy {
            RoutingPolicy::Rule => self.route_rule(scene),
            RoutingPolicy::Knn => self.route_knn(scene, memory),
            RoutingPolicy::Regress => self.route_regress(scene, memory),
            RoutingPolicy::AdaptiveStyle => self.route_adaptive_style(scene),
        }
    }

    /// Fixed table: direct lookups go dense, everything else goes to
    /// fused retrieval.
    pub fn route_rule(&self, scene: &SceneFeatures) -> RoutingDecision {
        let strategy = match scene.task_type {
            TaskType::Direct => StrategyId::Dense,
            TaskType::MultiHop | TaskType::Scientific | TaskType::Unknown => StrategyId::HybridRrf,
        };
        RoutingDecision {
            strategy,
            policy: RoutingPolicy::Rule,
            confidence: 1.0,
            explanation: format!(
                "rule: task type {} maps to {}",
                scene.task_type, strategy
            ),
        }
    }

    /// Majority vote over the best strategies of the nearest stored
    /// scenes. Vote ties go to the earlier strategy name; empty memory
    /// falls back to the rule table.
    pub fn route_knn(&self, scene: &SceneFeatures, memory: &ExperienceMemory) -> RoutingDecision {
        let neighbors = memory.nearest(scene, self.knn_k);
        if neighbors.is_empty() {
            let mut decision = self.route_rule(scene);
            decision.policy = RoutingPolicy::Knn;
            decision.explanation = format!("knn: empty memory, fallback to {}", decision.explanation);
            return decision;
        }
        let mut votes: BTreeMap<StrategyId, usize> = BTreeMap::new();
        for n in &neighbors {
            *votes.entry(n.best_strategy).or_insert(0) += 1;
        }
        let mut strategy = StrategyId::Bm25;
        let mut top = 0;
        for (&s, &count) in &votes {
            if count > top {
                top = count;
                strategy = s;
            }
        }
        RoutingDecision {
            strategy,
            policy: RoutingPolicy::Knn,
            confidence: top as f64 / neighbors.len() as f64,
            explanation: format!(
                "knn: {top} of {} neighbors favored {strategy}",
                neighbors.len()
            ),
        }
    }

    /// Predicts each strategy's score as its mean over the neighbors
    /// that scored it, then picks the highest prediction. Prediction
    /// ties go to the earlier strategy name; empty memory falls back to
    /// the rule table.
    pub fn route_regress(
        &self,
        scene: &SceneFeatures,
        memory: &ExperienceMemory,
    ) -> RoutingDecision {
        let neighbors = memory.nearest(scene, self.knn_k);
        if neighbors.is_empty() {
            let mut decision = self.route_rule(scene);
            decision.policy = RoutingPolicy::Regress;
            decision.explanation =
                format!("regress: empty memory, fallback to {}", decision.explanation);
            return decision;
        }
        let mut sums: BTreeMap<StrategyId, (f64, usize)> = BTreeMap::new();
        for n in &neighbors {
            for (&s, &v) in &n.score_vector {
                let entry = sums.entry(s).or_insert((0.0, 0));
                entry.0 += v;
                entry.1 += 1;
            }
        }
        let mut strategy = StrategyId::Bm25;
        let mut best = f64::NEG_INFINITY;
        for (&s, &(sum, count)) in &sums {
            let mean = sum / count as f64;
            if mean > best {
                best = mean;
                strategy = s;
            }
        }
        RoutingDecision {
            strategy,
            policy: RoutingPolicy::Regress,
            confidence: best.clamp(0.0, 1.0),
            explanation: format!(
                "regress: predicted score {best:.3} for {strategy} over {} neighbors",
                neighbors.len()
            ),
        }
    }

    /// Complexity threshold: simple questions go dense, complex ones go
    /// to fused retrieval. Confidence grows with the distance from the
    /// threshold.
    pub fn route_adaptive_style(&self, scene: &SceneFeatures) -> RoutingDecision {
        let c = scene.question_complexity;
        let t = self.adaptive_threshold;
        let strategy = if c < t {
            StrategyId::Dense
        } else {
            StrategyId::HybridRrf
        };
        let confidence = (c - t).abs() / t.max(1.0 - t);
        let relation = if c < t { "below" } else { "at or above" };
        RoutingDecision {
            strategy,
            policy: RoutingPolicy::AdaptiveStyle,
            confidence,
            explanation: format!("adaptive_style: complexity {c:.3} {relation} threshold {t}"),
        }
    }
}
