//! Message-passing decoders with per-iteration hard-decision traces.
//!
//! All decoders use flooding schedules. Iteration 0 is the hard decision
//! of the channel input itself; iteration `k >= 1` follows one round of
//! check-to-variable and variable-to-check messages.

mod gallager;
mod layout;
mod soft;
mod trapping;

pub use gallager::gallager_decode;
pub use soft::{bp_decode, min_sum_decode};
pub use trapping::{extract_trapping_set, trace_json, TrappingSetReport, DEFAULT_WINDOW};

use crate::channel::{ChannelModel, ChannelOutput, LlrVector};
use crate::code_model::{BinaryVector, TannerGraph};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    GallagerA,
    GallagerB,
    #[serde(rename = "bp")]
    Bp,
    MinSum,
}

impl Algorithm {
    pub fn is_hard_decision(self) -> bool {
        matches!(self, Self::GallagerA | Self::GallagerB)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::GallagerA => "gallager_a",
            Self::GallagerB => "gallager_b",
            Self::Bp => "bp",
            Self::MinSum => "min_sum",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "gallager_a" | "gallagera" | "ga" => Ok(Self::GallagerA),
            "gallager_b" | "gallagerb" | "gb" => Ok(Self::GallagerB),
            "bp" | "sum_product" => Ok(Self::Bp),
            "min_sum" | "minsum" | "ms" => Ok(Self::MinSum),
            other => Err(Error::InvalidParameter(format!("unknown iterative decoder {other:?}"))),
        }
    }
}

/// One entry `b_{k,d}` of a Gallager B threshold table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdEntry {
    pub iteration: usize,
    pub degree: usize,
    pub threshold: usize,
}

/// Variable-node flip thresholds for Gallager B.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdSchedule {
    /// `b = d - 1` for `d <= 3`, `ceil((d + 1) / 2)` above, every iteration.
    #[default]
    Default,
    /// Explicit `(iteration, degree) -> b` table; missing entries are errors.
    Table(Vec<ThresholdEntry>),
}

impl ThresholdSchedule {
    fn default_threshold(degree: usize) -> usize {
        if degree <= 3 {
            degree.saturating_sub(1)
        } else {
            (degree + 2) / 2
        }
    }

    pub fn threshold(&self, iteration: usize, degree: usize) -> Result<usize> {
        let b = match self {
            Self::Default => Self::default_threshold(degree),
            Self::Table(entries) => entries
                .iter()
                .find(|e| e.iteration == iteration && e.degree == degree)
                .map(|e| e.threshold)
                .ok_or(Error::MissingThreshold { iteration, degree })?,
        };
        if degree >= 2 && (b < degree.div_ceil(2) || b > degree - 1) {
            return Err(Error::InvalidParameter(format!(
                "threshold {b} for degree {degree} outside [ceil(d/2), d-1]"
            )));
        }
        Ok(b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterConfig {
    pub algorithm: Algorithm,
    pub max_iterations: usize,
    #[serde(default)]
    pub thresholds: ThresholdSchedule,
    pub halt_on_codeword: bool,
}

impl IterConfig {
    pub const DEFAULT_ITERATIONS: usize = 50;

    pub fn new(algorithm: Algorithm, max_iterations: usize) -> Self {
        Self { algorithm, max_iterations, thresholds: ThresholdSchedule::Default, halt_on_codeword: true }
    }

    pub fn gallager_a(max_iterations: usize) -> Self {
        Self::new(Algorithm::GallagerA, max_iterations)
    }

    pub fn gallager_b(max_iterations: usize, thresholds: ThresholdSchedule) -> Self {
        Self { thresholds, ..Self::new(Algorithm::GallagerB, max_iterations) }
    }

    pub fn bp(max_iterations: usize) -> Self {
        Self::new(Algorithm::Bp, max_iterations)
    }

    pub fn min_sum(max_iterations: usize) -> Self {
        Self::new(Algorithm::MinSum, max_iterations)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be positive".into()));
        }
        Ok(())
    }

    /// Threshold used at `iteration` for a variable of `degree`.
    pub fn threshold(&self, iteration: usize, degree: usize) -> Result<usize> {
        match self.algorithm {
            Algorithm::GallagerA => Ok(degree.saturating_sub(1)),
            _ => self.thresholds.threshold(iteration, degree),
        }
    }

    /// Decodes a channel output, using the LLRs of `channel` for soft decoders.
    pub fn decode_output(
        &self,
        g: &TannerGraph,
        channel: &ChannelModel,
        out: &ChannelOutput,
    ) -> Result<DecodeTrace> {
        if self.algorithm.is_hard_decision() {
            gallager_decode(g, &out.hard_decision(), self)
        } else {
            self.decode_llr(g, &channel.llr(out)?)
        }
    }

    /// Soft decoders take LLRs directly; Gallager decoders take their sign.
    pub fn decode_llr(&self, g: &TannerGraph, llr: &LlrVector) -> Result<DecodeTrace> {
        match self.algorithm {
            Algorithm::Bp => bp_decode(g, llr, self),
            Algorithm::MinSum => min_sum_decode(g, llr, self),
            _ => {
                let bits: Vec<bool> = llr.values().iter().map(|&v| v <= 0.0).collect();
                gallager_decode(g, &BinaryVector::from_bits(&bits), self)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeOutcome {
    ConvergedZero,
    ConvergedOtherCodeword,
    Failure,
}

/// Hard decisions `x^(0..)` of one decoding run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeTrace {
    pub algorithm: Algorithm,
    pub max_iterations: usize,
    pub decisions: Vec<BinaryVector>,
    pub halted_at: Option<usize>,
    pub outcome: DecodeOutcome,
}

impl DecodeTrace {
    /// A decoding failure in the FER sense: anything but the zero codeword.
    pub fn is_failure(&self) -> bool {
        self.outcome != DecodeOutcome::ConvergedZero
    }

    pub fn final_decision(&self) -> &BinaryVector {
        self.decisions.last().expect("trace always holds x^(0)")
    }

    fn finish(
        g: &TannerGraph,
        cfg: &IterConfig,
        decisions: Vec<BinaryVector>,
        halted_at: Option<usize>,
    ) -> Self {
        let last = decisions.last().expect("nonempty");
        let outcome = if last.is_zero() {
            DecodeOutcome::ConvergedZero
        } else if g.is_codeword_bits(&last.to_bits()) {
            DecodeOutcome::ConvergedOtherCodeword
        } else {
            DecodeOutcome::Failure
        };
        Self { algorithm: cfg.algorithm, max_iterations: cfg.max_iterations, decisions, halted_at, outcome }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_thresholds() {
        let s = ThresholdSchedule::Default;
        assert_eq!(s.threshold(1, 3).unwrap(), 2);
        assert_eq!(s.threshold(1, 4).unwrap(), 3);
        assert_eq!(s.threshold(1, 5).unwrap(), 3);
        assert_eq!(s.threshold(1, 6).unwrap(), 4);
        assert_eq!(s.threshold(1, 2).unwrap(), 1);
    }

    #[test]
    fn table_thresholds() {
        let s = ThresholdSchedule::Table(vec![ThresholdEntry { iteration: 1, degree: 5, threshold: 4 }]);
        assert_eq!(s.threshold(1, 5).unwrap(), 4);
        assert_eq!(s.threshold(2, 5), Err(Error::MissingThreshold { iteration: 2, degree: 5 }));
        let bad = ThresholdSchedule::Table(vec![ThresholdEntry { iteration: 1, degree: 5, threshold: 2 }]);
        assert!(bad.threshold(1, 5).is_err());
    }

    #[test]
    fn algorithm_names_parse() {
        for a in [Algorithm::GallagerA, Algorithm::GallagerB, Algorithm::Bp, Algorithm::MinSum] {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("lp".parse::<Algorithm>().is_err());
    }
}
