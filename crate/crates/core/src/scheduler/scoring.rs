//! Scoring plugins and the final ordering of eligible nodes.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::model::ScoreBreakdown;

/// Weights of the aggregate score. Both default to 1 (plain sum).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScoreWeights {
    pub latency: f64,
    pub temperature: f64,
}

impl Default for ScoreWeights {
    fn default() -> Self {
        ScoreWeights {
            latency: 1.0,
            temperature: 1.0,
        }
    }
}

impl ScoreWeights {
    pub fn aggregate(&self, latency_score: f64, temperature_score: f64) -> f64 {
        self.latency * latency_score + self.temperature * temperature_score
    }
}

/// Min-max normalises raw worst-path latencies into `[0, 100]`, lowest
/// latency scoring 100. Every node scores 100 when all raws are equal.
pub fn score_network_latency(raw_ms: &[f64]) -> Vec<f64> {
    let min = raw_ms.iter().copied().fold(f64::INFINITY, f64::min);
    let max = raw_ms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max > min) {
        return vec![100.0; raw_ms.len()];
    }
    raw_ms.iter().map(|r| 100.0 * ((max - r) / (max - min))).collect()
}

/// Aggregate descending, then worst latency ascending, then node id ascending.
pub fn rank(a: &ScoreBreakdown, b: &ScoreBreakdown) -> Ordering {
    b.aggregate
        .total_cmp(&a.aggregate)
        .then(a.worst_latency_ms.total_cmp(&b.worst_latency_ms))
        .then(a.node.cmp(&b.node))
}

pub fn sort_by_rank(scores: &mut [ScoreBreakdown]) {
    scores.sort_by(rank);
}
