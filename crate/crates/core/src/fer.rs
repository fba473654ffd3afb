//! Monte-Carlo frame error rates, instanton-based FER prediction, and ISA
//! coverage estimation.

use crate::channel::{ChannelModel, ChannelOutput};
use crate::code_model::BinaryVector;
use crate::error::{Error, Result};
use crate::instanton_search::{Decoder, InstantonRecord};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Frames per Monte-Carlo batch; batch `k` draws from RNG stream `k`.
pub const BATCH_FRAMES: u64 = 256;
/// Batches decoded per parallel round. Fixed, so results do not depend on
/// the number of worker threads.
const ROUND_BATCHES: u64 = 64;
const Z95: f64 = 1.959_963_984_540_054;

/// Anything that decides whether a channel output is decoded incorrectly.
pub trait FrameDecoder: Sync {
    fn fails(&self, out: &ChannelOutput) -> Result<bool>;
}

impl FrameDecoder for Decoder<'_> {
    fn fails(&self, out: &ChannelOutput) -> Result<bool> {
        match out {
            ChannelOutput::Bsc(y) => self.fails_bsc(y),
            ChannelOutput::Awgn(y) => self.fails_awgn(y),
        }
    }
}

/// Synthetic decoder failing exactly when every bit of `support` is in error.
#[derive(Debug, Clone)]
pub struct SupersetOracle {
    pub support: Vec<usize>,
}

impl FrameDecoder for SupersetOracle {
    fn fails(&self, out: &ChannelOutput) -> Result<bool> {
        let y = out.hard_decision();
        Ok(self.support.iter().all(|&i| y.get(i)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRule {
    pub min_errors: u64,
    pub max_frames: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FerPoint {
    /// Epsilon (BSC) or sigma (AWGN) unless the caller relabels it.
    pub param: f64,
    pub frames: u64,
    pub errors: u64,
    pub fer: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(errors: u64, frames: u64) -> (f64, f64) {
    if frames == 0 {
        return (0.0, 1.0);
    }
    let n = frames as f64;
    let p = errors as f64 / n;
    let z2 = Z95 * Z95;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = Z95 / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if errors == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if errors == frames { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

impl FerPoint {
    pub fn new(param: f64, frames: u64, errors: u64) -> Self {
        let (ci_lo, ci_hi) = wilson_interval(errors, frames);
        let fer = if frames == 0 { 0.0 } else { errors as f64 / frames as f64 };
        Self { param, frames, errors, fer, ci_lo, ci_hi }
    }
}

fn run_batch(dec: &dyn FrameDecoder, channel: &ChannelModel, n: usize, seed: u64, batch: u64, frames: u64) -> Result<u64> {
    let mut rng = crate::seeded_rng(seed);
    rng.set_stream(batch);
    let mut errors = 0;
    for _ in 0..frames {
        if dec.fails(&channel.sample_zero_codeword(n, &mut rng))? {
            errors += 1;
        }
    }
    Ok(errors)
}

/// Simulates all-zero transmission until `stop.min_errors` errors or
/// `stop.max_frames` frames, checking the rule after each batch in order.
pub fn mc_fer(dec: &dyn FrameDecoder, channel: &ChannelModel, n: usize, stop: StopRule, seed: u64) -> Result<FerPoint> {
    if stop.min_errors == 0 || stop.max_frames == 0 {
        return Err(Error::InvalidParameter("min_errors and max_frames must be positive".into()));
    }
    let param = match *channel {
        ChannelModel::Bsc { epsilon } => epsilon,
        ChannelModel::Awgn { sigma } => sigma,
    };
    let total_batches = stop.max_frames.div_ceil(BATCH_FRAMES);
    let (mut frames, mut errors) = (0u64, 0u64);
    let mut next = 0u64;
    while next < total_batches {
        let end = (next + ROUND_BATCHES).min(total_batches);
        let results: Vec<Result<(u64, u64)>> = (next..end)
            .into_par_iter()
            .map(|b| {
                let size = BATCH_FRAMES.min(stop.max_frames - b * BATCH_FRAMES);
                run_batch(dec, channel, n, seed, b, size).map(|e| (size, e))
            })
            .collect();
        for r in results {
            let (f, e) = r?;
            frames += f;
            errors += e;
            if errors >= stop.min_errors {
                return Ok(FerPoint::new(param, frames, errors));
            }
        }
        next = end;
    }
    Ok(FerPoint::new(param, frames, errors))
}

pub fn fer_csv(points: &[FerPoint]) -> String {
    let mut s = String::from("param,frames,errors,fer,ci_lo,ci_hi\n");
    for p in points {
        let _ = writeln!(s, "{},{},{},{:e},{:e},{:e}", p.param, p.frames, p.errors, p.fer, p.ci_lo, p.ci_hi);
    }
    s
}

pub fn prediction_csv(curve: &[(f64, f64)]) -> String {
    let mut s = String::from("param,fer_predicted\n");
    for (x, y) in curve {
        let _ = writeln!(s, "{x},{y:e}");
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub weight: f64,
    pub multiplicity: u64,
}

/// Instanton weights with multiplicities, merged by weight and sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstantonSpectrum {
    entries: Vec<SpectrumEntry>,
}

impl InstantonSpectrum {
    pub fn new(entries: impl IntoIterator<Item = (f64, u64)>) -> Result<Self> {
        let mut merged: BTreeMap<u64, SpectrumEntry> = BTreeMap::new();
        for (w, m) in entries {
            if !(w > 0.0 && w.is_finite()) || m == 0 {
                return Err(Error::InvalidParameter(format!("bad spectrum entry ({w}, {m})")));
            }
            merged.entry(w.to_bits()).or_insert(SpectrumEntry { weight: w, multiplicity: 0 }).multiplicity += m;
        }
        if merged.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        let mut entries: Vec<SpectrumEntry> = merged.into_values().collect();
        entries.sort_by(|a, b| a.weight.total_cmp(&b.weight));
        Ok(Self { entries })
    }

    /// Spectrum of distinct records (by dedup key).
    pub fn from_records(records: &[InstantonRecord]) -> Result<Self> {
        Self::new(crate::instanton_search::dedup(records).iter().map(|r| (r.weight, 1)))
    }

    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    /// Keeps only entries of weight at most `max_weight`.
    pub fn truncated(&self, max_weight: f64) -> Result<Self> {
        Self::new(self.entries.iter().filter(|e| e.weight <= max_weight).map(|e| (e.weight, e.multiplicity)))
    }
}

/// `FER(ε) = Σ N_β ε^{w_β} (1 - ε)^{n - w_β}`.
pub fn predict_fer_bsc(spec: &InstantonSpectrum, n: usize, eps: &[f64]) -> Result<Vec<(f64, f64)>> {
    if let Some(&e) = eps.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
        return Err(Error::InvalidParameter(format!("epsilon {e} not in (0, 1)")));
    }
    Ok(eps
        .iter()
        .map(|&e| {
            let f = spec
                .entries
                .iter()
                .map(|s| s.multiplicity as f64 * (s.weight * e.ln() + (n as f64 - s.weight) * (1.0 - e).ln()).exp())
                .sum();
            (e, f)
        })
        .collect())
}

/// Standard Gaussian tail `Q(x) = P(Z > x)`.
pub fn gaussian_tail(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// `FER(σ) = Σ N_β Q(sqrt(w_β) / σ)`, without curvature corrections.
pub fn predict_fer_awgn(spec: &InstantonSpectrum, sigmas: &[f64]) -> Result<Vec<(f64, f64)>> {
    if let Some(&s) = sigmas.iter().find(|s| !(**s > 0.0)) {
        return Err(Error::InvalidParameter(format!("sigma {s} must be positive")));
    }
    Ok(sigmas
        .iter()
        .map(|&s| (s, spec.entries.iter().map(|e| e.multiplicity as f64 * gaussian_tail(e.weight.sqrt() / s)).sum()))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageEstimate {
    /// Estimated number of distinct instantons.
    pub estimated_total: f64,
    /// Expected trials to see all of them, `N H_N`.
    pub trials_needed: f64,
}

pub fn harmonic(n: u64) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

/// Least-squares `N` for `u_t ≈ N (1 - e^{-t/N})`, searched over
/// `[u_max, 1e9]` in log space by golden section.
fn fit_total(counts: &[usize]) -> f64 {
    let lo_bound = *counts.iter().max().expect("nonempty") as f64;
    let sse = |n: f64| -> f64 {
        counts
            .iter()
            .enumerate()
            .map(|(t, &u)| {
                let model = n * -(-(t as f64 + 1.0) / n).exp_m1();
                (model - u as f64).powi(2)
            })
            .sum()
    };
    let (mut a, mut b) = (lo_bound.max(1.0).ln(), 1e9f64.ln());
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if sse(c.exp()) <= sse(d.exp()) {
            b = d;
        } else {
            a = c;
        }
    }
    (0.5 * (a + b)).exp()
}

/// Coupon-collector coverage from the running count of distinct instantons
/// after each trial. A prefix of `t` trials counts as saturated when its
/// fitted total is at most `t`; the estimate is the largest of the distinct
/// count seen and the fits of saturated prefixes, so it never decreases as
/// trials are appended.
pub fn coverage_estimate(unique_counts_per_trial: &[usize]) -> Result<CoverageEstimate> {
    if unique_counts_per_trial.is_empty() {
        return Err(Error::InvalidParameter("no trials".into()));
    }
    let last = *unique_counts_per_trial.last().expect("nonempty");
    let estimated_total = if unique_counts_per_trial.iter().all(|&u| u <= 1) {
        1.0
    } else {
        (1..=unique_counts_per_trial.len())
            .map(|t| fit_total(&unique_counts_per_trial[..t]))
            .enumerate()
            .filter(|&(t, fit)| fit <= (t + 1) as f64)
            .fold(last as f64, |acc, (_, fit)| acc.max(fit))
    };
    let rounded = estimated_total.round().max(1.0) as u64;
    Ok(CoverageEstimate { estimated_total, trials_needed: rounded as f64 * harmonic(rounded) })
}

/// Running count of distinct dedup keys, one entry per record.
pub fn unique_counts(records: &[InstantonRecord]) -> Vec<usize> {
    let mut seen = std::collections::HashSet::new();
    records
        .iter()
        .map(|r| {
            seen.insert(r.dedup_key());
            seen.len()
        })
        .collect()
}

/// Probability that a BSC output contains all bits of a fixed support of
/// size `w`: exactly `ε^w`.
pub fn superset_probability(w: usize, epsilon: f64) -> f64 {
    epsilon.powi(w as i32)
}

/// Convenience for tests and the CLI: output vector with `support` flipped.
pub fn flipped(n: usize, support: &[usize]) -> Result<ChannelOutput> {
    Ok(ChannelOutput::Bsc(BinaryVector::from_support(n, support.iter().copied())?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_basics() {
        let (lo, hi) = wilson_interval(50, 100);
        assert!(lo < 0.5 && hi > 0.5 && (0.5 - lo - (hi - 0.5)).abs() < 1e-12);
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.05);
    }

    #[test]
    fn bsc_prediction_example() {
        let spec = InstantonSpectrum::new([(3.0, 155)]).unwrap();
        let (_, f) = predict_fer_bsc(&spec, 155, &[0.01]).unwrap()[0];
        let expected = 155.0 * 1e-6 * 0.99f64.powi(152);
        assert!((f - expected).abs() < 1e-15 * expected.max(1.0) + 1e-18);
        assert!((f - 3.4e-5).abs() < 0.05e-5);
    }

    #[test]
    fn bsc_slope_tends_to_min_weight() {
        let spec = InstantonSpectrum::new([(3.0, 155), (4.0, 465)]).unwrap();
        let c = predict_fer_bsc(&spec, 155, &[1e-7, 2e-7]).unwrap();
        let slope = (c[1].1 / c[0].1).ln() / 2f64.ln();
        assert!((slope - 3.0).abs() < 1e-3, "{slope}");
    }

    #[test]
    fn awgn_single_entry_is_pairwise_error() {
        let spec = InstantonSpectrum::new([(5.0, 1)]).unwrap();
        let (_, f) = predict_fer_awgn(&spec, &[0.7]).unwrap()[0];
        assert!((f - gaussian_tail(5f64.sqrt() / 0.7)).abs() < 1e-18);
        assert!((gaussian_tail(0.0) - 0.5).abs() < 1e-15);
        assert!((gaussian_tail(1.0) - 0.158_655_253_931_457_05).abs() < 1e-12);
    }

    #[test]
    fn empty_spectrum() {
        assert_eq!(InstantonSpectrum::new(std::iter::empty()), Err(Error::EmptySpectrum));
    }

    #[test]
    fn spectrum_merges_weights() {
        let s = InstantonSpectrum::new([(6.0, 2), (5.0, 1), (6.0, 3)]).unwrap();
        assert_eq!(s.entries().len(), 2);
        assert_eq!(s.entries()[1].multiplicity, 5);
    }

    #[test]
    fn coverage_degenerate_and_unit() {
        let c = coverage_estimate(&[1, 1, 1, 1]).unwrap();
        assert_eq!(c.estimated_total, 1.0);
        assert_eq!(c.trials_needed, 1.0);
        assert!(coverage_estimate(&[]).is_err());
    }

    #[test]
    fn coverage_recovers_pool_size() {
        use rand::Rng;
        let mut rng = crate::seeded_rng(9);
        let mut seen = std::collections::HashSet::new();
        let counts: Vec<usize> = (0..600)
            .map(|_| {
                seen.insert(rng.random_range(0..100u32));
                seen.len()
            })
            .collect();
        let c = coverage_estimate(&counts).unwrap();
        assert!((c.estimated_total - 100.0).abs() < 10.0, "{c:?}");
    }

    #[test]
    fn mc_fer_oracle_and_determinism() {
        let oracle = SupersetOracle { support: vec![0, 1] };
        let ch = ChannelModel::bsc(0.2).unwrap();
        let stop = StopRule { min_errors: 200, max_frames: 100_000 };
        let a = mc_fer(&oracle, &ch, 10, stop, 4).unwrap();
        let b = mc_fer(&oracle, &ch, 10, stop, 4).unwrap();
        assert_eq!(a, b);
        assert!(a.errors >= 200);
        assert!(a.ci_lo <= 0.04 && 0.04 <= a.ci_hi, "{a:?}");
        let capped = mc_fer(&oracle, &ch, 10, StopRule { min_errors: 1_000_000, max_frames: 1000 }, 4).unwrap();
        assert_eq!(capped.frames, 1000);
    }

    #[test]
    fn csv_headers() {
        assert!(fer_csv(&[FerPoint::new(0.01, 10, 1)]).starts_with("param,frames,errors,fer,ci_lo,ci_hi\n0.01,10,1,"));
        assert_eq!(prediction_csv(&[(0.5, 0.25)]), "param,fer_predicted\n0.5,2.5e-1\n");
    }
}
