//! Instanton searches: ISA (LP over the BSC), PCS (LP over the AWGN
//! channel), Nelder-Mead over the error surface for iterative decoders, and
//! the combinatorial critical-number search for Gallager decoders.

mod amoeba;
mod critical;
mod isa;
mod pcs;

pub use amoeba::{amoeba_iterative, scale_to_error_surface, AmoebaConfig, SurfacePoint};
pub use critical::{critical_number_search, trapping_closure, CriticalNumber, DEFAULT_SIZE_CAP};
pub use isa::{isa_bsc_lp, isa_multi_start, ISA_RETRY_CAP};
pub use pcs::{awgn_instanton_from_pcw, pcs_awgn_lp, pcs_from_input, pcs_multi_start, PCS_DEFAULT_STRENGTH, PCS_STEP_CAP};

use crate::channel::{ChannelModel, LlrVector};
use crate::code_model::{BinaryVector, TannerGraph};
use crate::error::{expect_len, Error, Result};
use crate::iter_decode::{IterConfig, TrappingSetReport};
use crate::lp_decode::{LcLpInstance, PseudoCodeword};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::io::{BufRead, Write};

/// Relative failure-side nudge applied to instanton candidates.
pub const DELTA: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Bsc,
    Awgn,
}

/// A decoder as seen by the searches: it maps a channel output to
/// success or failure.
#[derive(Debug, Clone, Copy)]
pub enum Decoder<'a> {
    Lp(&'a LcLpInstance),
    /// Soft decoders use the LLRs of `channel`; Gallager decoders use signs only.
    Iterative { graph: &'a TannerGraph, cfg: &'a IterConfig, channel: ChannelModel },
}

impl Decoder<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            Decoder::Lp(_) => "lp",
            Decoder::Iterative { cfg, .. } => cfg.algorithm.name(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Decoder::Lp(inst) => inst.n(),
            Decoder::Iterative { graph, .. } => graph.n(),
        }
    }

    /// Whether decoding the BSC output `y` (support = flipped bits) fails.
    pub fn fails_bsc(&self, y: &BinaryVector) -> Result<bool> {
        expect_len(self.n(), y.len())?;
        match self {
            Decoder::Lp(inst) => Ok(!inst.solve(&LlrVector::from_bsc_magnitude(y, 1.0))?.pseudo_codeword.is_zero()),
            Decoder::Iterative { graph, cfg, channel } => {
                let magnitude = match channel {
                    ChannelModel::Bsc { epsilon } => ChannelModel::bsc_llr_magnitude(*epsilon),
                    ChannelModel::Awgn { .. } => 1.0,
                };
                Ok(cfg.decode_llr(graph, &LlrVector::from_bsc_magnitude(y, magnitude))?.is_failure())
            }
        }
    }

    /// Whether decoding the BPSK channel output `yhat` (all ones when noiseless) fails.
    pub fn fails_awgn(&self, yhat: &[f64]) -> Result<bool> {
        expect_len(self.n(), yhat.len())?;
        Ok(match self {
            Decoder::Lp(inst) => !inst.solve(&LlrVector::new(yhat.to_vec())?)?.pseudo_codeword.is_zero(),
            Decoder::Iterative { graph, cfg, channel } => {
                let scale = match channel {
                    ChannelModel::Awgn { sigma } => 2.0 / (sigma * sigma),
                    ChannelModel::Bsc { .. } => 1.0,
                };
                cfg.decode_llr(graph, &LlrVector::new(yhat.iter().map(|v| v * scale).collect())?)?.is_failure()
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    /// Flipped bits.
    Binary(BinaryVector),
    /// Noise `n` with channel output `1 - n`.
    Noise(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attribution {
    PseudoCodeword(PseudoCodeword),
    TrappingSet(TrappingSetReport),
    None,
}

/// Tolerances and caps in force when a record was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    pub delta: f64,
    pub tau_int: f64,
    pub tau_surf: f64,
    pub tau_stop: f64,
    pub step_cap: usize,
    pub retry_cap: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            delta: DELTA,
            tau_int: crate::lp_decode::TAU_INT,
            tau_surf: amoeba::TAU_SURF,
            tau_stop: amoeba::TAU_STOP,
            step_cap: PCS_STEP_CAP,
            retry_cap: ISA_RETRY_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchInfo {
    pub method: String,
    pub seed: Option<u64>,
    pub steps: usize,
    pub weight_trajectory: Vec<f64>,
    pub params: SearchParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstantonRecord {
    pub channel: ChannelKind,
    pub decoder: String,
    pub representation: Representation,
    /// Support size (BSC) or squared noise norm (AWGN).
    pub weight: f64,
    pub attribution: Attribution,
    pub search: SearchInfo,
}

impl InstantonRecord {
    pub fn binary(&self) -> Option<&BinaryVector> {
        match &self.representation {
            Representation::Binary(b) => Some(b),
            Representation::Noise(_) => None,
        }
    }

    pub fn noise(&self) -> Option<&[f64]> {
        match &self.representation {
            Representation::Noise(v) => Some(v),
            Representation::Binary(_) => None,
        }
    }

    pub fn pseudo_codeword(&self) -> Option<&PseudoCodeword> {
        match &self.attribution {
            Attribution::PseudoCodeword(p) => Some(p),
            _ => None,
        }
    }

    /// Sorted support for BSC records; noise quantized to 1e-6 for AWGN.
    pub fn dedup_key(&self) -> Vec<i64> {
        match &self.representation {
            Representation::Binary(b) => b.support().iter().map(|&i| i as i64).collect(),
            Representation::Noise(v) => v.iter().map(|x| (x * 1e6).round() as i64).collect(),
        }
    }

    /// Checks that the stored weight matches the representation.
    pub fn weight_consistent(&self) -> bool {
        match &self.representation {
            Representation::Binary(b) => self.weight == b.weight() as f64,
            Representation::Noise(v) => {
                let w: f64 = v.iter().map(|x| x * x).sum();
                (w - self.weight).abs() <= 1e-9 * w.max(1.0)
            }
        }
    }
}

/// Drops records whose dedup key was already seen, keeping first occurrences.
pub fn dedup(records: &[InstantonRecord]) -> Vec<InstantonRecord> {
    let mut seen = HashSet::new();
    records.iter().filter(|r| seen.insert(r.dedup_key())).cloned().collect()
}

/// Writes one JSON object per line.
pub fn write_jsonl<W: Write>(records: &[InstantonRecord], mut out: W) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<InstantonRecord>> {
    let mut records = Vec::new();
    for (k, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse { line: k + 1, message: e.to_string() })?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line).map_err(|e| Error::Parse { line: k + 1, message: e.to_string() })?);
    }
    Ok(records)
}

/// Largest subset size verified exhaustively for iterative decoders; larger
/// candidates only get the leave-one-out check.
pub const EXHAUSTIVE_VERIFY_CAP: usize = 16;

/// True iff `candidate` makes the decoder fail while every strict
/// sub-support decodes correctly. For LP decoding the leave-one-out
/// subsets suffice, since a support containing a failing support fails too.
pub fn verify_instanton(dec: &Decoder, candidate: &BinaryVector) -> Result<bool> {
    if !dec.fails_bsc(candidate)? {
        return Ok(false);
    }
    let s = candidate.support();
    let exhaustive = matches!(dec, Decoder::Iterative { .. }) && s.len() <= EXHAUSTIVE_VERIFY_CAP;
    if exhaustive {
        let full = (1u32 << s.len()) - 1;
        for mask in 0..full {
            let sub = BinaryVector::from_support(candidate.len(), (0..s.len()).filter(|k| mask >> k & 1 == 1).map(|k| s[k]))?;
            if dec.fails_bsc(&sub)? {
                return Ok(false);
            }
        }
    } else {
        for &i in s {
            if dec.fails_bsc(&candidate.without(i))? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(support: &[usize]) -> InstantonRecord {
        InstantonRecord {
            channel: ChannelKind::Bsc,
            decoder: "lp".into(),
            representation: Representation::Binary(BinaryVector::from_support(10, support.iter().copied()).unwrap()),
            weight: support.len() as f64,
            attribution: Attribution::None,
            search: SearchInfo {
                method: "isa".into(),
                seed: Some(1),
                steps: 1,
                weight_trajectory: vec![5.0],
                params: SearchParams::default(),
            },
        }
    }

    #[test]
    fn dedup_keeps_first() {
        let rs = vec![record(&[1, 2]), record(&[3]), record(&[1, 2])];
        let d = dedup(&rs);
        assert_eq!(d.len(), 2);
        assert!(d.iter().all(|r| r.weight_consistent()));
    }

    #[test]
    fn jsonl_round_trip() {
        let rs = vec![record(&[1, 2]), record(&[4, 5, 6])];
        let mut buf = Vec::new();
        write_jsonl(&rs, &mut buf).unwrap();
        assert_eq!(String::from_utf8_lossy(&buf).lines().count(), 2);
        assert_eq!(read_jsonl(&buf[..]).unwrap(), rs);
    }
}
