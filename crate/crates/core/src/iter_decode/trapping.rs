use super::{DecodeOutcome, DecodeTrace};
use crate::code_model::{classify_subset, TannerGraph};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Default number of trailing iterations treated as "eventually".
pub const DEFAULT_WINDOW: usize = 10;

/// Variables that are not eventually correct, approximated by the union of
/// wrong decisions over the last `window_used` iterations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrappingSetReport {
    pub support: Vec<usize>,
    pub a: usize,
    pub b: usize,
    pub window_used: usize,
    /// The window shows no repeating pattern of period at most half its
    /// length; the support may then miss part of a long oscillation.
    pub unresolved_oscillation: bool,
}

pub fn extract_trapping_set(trace: &DecodeTrace, g: &TannerGraph, window: usize) -> Result<TrappingSetReport> {
    if trace.outcome == DecodeOutcome::ConvergedZero {
        return Err(Error::NotAFailure);
    }
    if window == 0 {
        return Err(Error::InvalidParameter("window must be at least 1".into()));
    }
    let used = window.min(trace.decisions.len());
    let tail = &trace.decisions[trace.decisions.len() - used..];
    let mut support: Vec<usize> = tail.iter().flat_map(|x| x.support().iter().copied()).collect();
    support.sort_unstable();
    support.dedup();
    let (a, b) = classify_subset(g, &support);
    let periodic = (1..=used / 2).any(|p| (p..used).all(|i| tail[i] == tail[i - p]));
    Ok(TrappingSetReport { support, a, b, window_used: used, unresolved_oscillation: used >= 2 && !periodic })
}

/// JSON export of a trace and its trapping set.
pub fn trace_json(trace: &DecodeTrace, ts: Option<&TrappingSetReport>) -> serde_json::Value {
    serde_json::json!({
        "algorithm": trace.algorithm.name(),
        "D": trace.max_iterations,
        "halted_at": trace.halted_at,
        "outcome": trace.outcome,
        "final_support": trace.final_decision().support(),
        "ts": ts.map(|t| serde_json::json!({"a": t.a, "b": t.b, "support": t.support})),
    })
}
