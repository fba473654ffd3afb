//! BSC and BPSK/AWGN channel models for all-zero codeword transmission.
//!
//! The BPSK map is `0 -> +1`, `1 -> -1`, so the all-zero codeword is sent
//! as the all-ones vector. LLRs follow the negative log-likelihood ratio
//! convention: positive values favor bit 0.

use crate::code_model::BinaryVector;
use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ChannelModel {
    Bsc { epsilon: f64 },
    Awgn { sigma: f64 },
}

impl ChannelModel {
    pub fn bsc(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::InvalidParameter(format!("BSC epsilon {epsilon} not in (0, 1/2)")));
        }
        Ok(Self::Bsc { epsilon })
    }

    pub fn awgn(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("AWGN sigma {sigma} must be positive")));
        }
        Ok(Self::Awgn { sigma })
    }

    /// AWGN channel for a given `E_b/N_0` in dB and code rate:
    /// `E_b/N_0 = 1 / (2 r sigma^2)`.
    pub fn awgn_from_ebn0_db(ebn0_db: f64, rate: f64) -> Result<Self> {
        let ebn0 = 10f64.powf(ebn0_db / 10.0);
        Self::awgn((1.0 / (2.0 * rate * ebn0)).sqrt())
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Bsc { .. } => "bsc",
            Self::Awgn { .. } => "awgn",
        }
    }

    /// LLR magnitude of a BSC observation, `ln((1 - eps) / eps)`.
    pub fn bsc_llr_magnitude(epsilon: f64) -> f64 {
        ((1.0 - epsilon) / epsilon).ln()
    }

    pub fn llr(&self, out: &ChannelOutput) -> Result<LlrVector> {
        match (self, out) {
            (Self::Bsc { epsilon }, ChannelOutput::Bsc(y)) => Ok(LlrVector::from_bsc(y, *epsilon)),
            (Self::Awgn { sigma }, ChannelOutput::Awgn(y)) => {
                let scale = 2.0 / (sigma * sigma);
                Ok(LlrVector(y.iter().map(|&v| scale * v).collect()))
            }
            _ => Err(self.mismatch(out)),
        }
    }

    /// Channel output for the all-zero codeword: BSC flips each bit with
    /// probability epsilon, AWGN adds `N(0, sigma^2)` to each `+1`.
    pub fn sample_zero_codeword<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> ChannelOutput {
        match *self {
            Self::Bsc { epsilon } => {
                let support = (0..n).filter(|_| rng.random::<f64>() < epsilon);
                ChannelOutput::Bsc(BinaryVector::from_support(n, support).expect("in range"))
            }
            Self::Awgn { sigma } => ChannelOutput::Awgn(
                (0..n)
                    .map(|_| {
                        let z: f64 = StandardNormal.sample(rng);
                        1.0 + sigma * z
                    })
                    .collect(),
            ),
        }
    }

    /// Log-probability of observing `out` given the all-zero codeword. The
    /// AWGN density drops the normalization constant, so only differences
    /// between outputs are meaningful.
    pub fn log_probability(&self, out: &ChannelOutput) -> Result<f64> {
        match (self, out) {
            (Self::Bsc { epsilon }, ChannelOutput::Bsc(y)) => {
                let flips = y.weight() as f64;
                let n = y.len() as f64;
                Ok(flips * epsilon.ln() + (n - flips) * (1.0 - epsilon).ln())
            }
            (Self::Awgn { sigma }, ChannelOutput::Awgn(y)) => {
                let sq: f64 = y.iter().map(|v| (v - 1.0) * (v - 1.0)).sum();
                Ok(-sq / (2.0 * sigma * sigma))
            }
            _ => Err(self.mismatch(out)),
        }
    }

    fn mismatch(&self, out: &ChannelOutput) -> Error {
        Error::KindMismatch { model: self.kind_name(), output: out.kind_name() }
    }
}

/// `E_b/N_0` in dB for noise standard deviation `sigma` at code rate `rate`.
pub fn ebn0_db(sigma: f64, rate: f64) -> f64 {
    10.0 * (1.0 / (2.0 * rate * sigma * sigma)).log10()
}

/// Channel observation: hard bits on the BSC, real BPSK samples on AWGN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "values", rename_all = "lowercase")]
pub enum ChannelOutput {
    Bsc(BinaryVector),
    Awgn(Vec<f64>),
}

impl ChannelOutput {
    pub fn len(&self) -> usize {
        match self {
            Self::Bsc(y) => y.len(),
            Self::Awgn(y) => y.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Bsc(_) => "bsc",
            Self::Awgn(_) => "awgn",
        }
    }

    /// Hard decision of the observation (`1` where the sample is not positive).
    pub fn hard_decision(&self) -> BinaryVector {
        match self {
            Self::Bsc(y) => y.clone(),
            Self::Awgn(y) => BinaryVector::from_bits(&y.iter().map(|&v| v <= 0.0).collect::<Vec<_>>()),
        }
    }
}

/// Per-variable negative log-likelihood ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlrVector(pub Vec<f64>);

impl LlrVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("LLR entries must be finite".into()));
        }
        Ok(Self(values))
    }

    /// BSC LLRs with a fixed magnitude `ln((1-eps)/eps)`.
    pub fn from_bsc(y: &BinaryVector, epsilon: f64) -> Self {
        Self::from_bsc_magnitude(y, ChannelModel::bsc_llr_magnitude(epsilon))
    }

    /// `+magnitude` off the support, `-magnitude` on it.
    pub fn from_bsc_magnitude(y: &BinaryVector, magnitude: f64) -> Self {
        let mut v = vec![magnitude; y.len()];
        for &i in y.support() {
            v[i] = -magnitude;
        }
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0.iter().map(|v| v * factor).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;

    #[test]
    fn bsc_llr_values() {
        let ch = ChannelModel::bsc(0.1).unwrap();
        let y = BinaryVector::from_support(3, [1]).unwrap();
        let llr = ch.llr(&ChannelOutput::Bsc(y)).unwrap();
        assert!((llr.0[0] - 9f64.ln()).abs() < 1e-12);
        assert!((llr.0[0] - 2.19722).abs() < 1e-5);
        assert_eq!(llr.0[1], -llr.0[0]);
    }

    #[test]
    fn awgn_llr_values() {
        let ch = ChannelModel::awgn(1.0).unwrap();
        let llr = ch.llr(&ChannelOutput::Awgn(vec![1.5, -0.25])).unwrap();
        assert_eq!(llr.0, vec![3.0, -0.5]);
    }

    #[test]
    fn kind_mismatch_is_an_error() {
        let ch = ChannelModel::awgn(1.0).unwrap();
        let out = ChannelOutput::Bsc(BinaryVector::zeros(2));
        assert!(matches!(ch.llr(&out), Err(Error::KindMismatch { .. })));
        assert!(matches!(ch.log_probability(&out), Err(Error::KindMismatch { .. })));
    }

    #[test]
    fn parameter_ranges() {
        assert!(ChannelModel::bsc(0.5).is_err());
        assert!(ChannelModel::bsc(0.0).is_err());
        assert!(ChannelModel::awgn(-1.0).is_err());
        assert!(LlrVector::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn log_probability_values() {
        let ch = ChannelModel::bsc(0.1).unwrap();
        let zero = ChannelOutput::Bsc(BinaryVector::zeros(10));
        assert!((ch.log_probability(&zero).unwrap() - 10.0 * 0.9f64.ln()).abs() < 1e-12);
        let two = ChannelOutput::Bsc(BinaryVector::from_support(10, [2, 7]).unwrap());
        let want = 2.0 * 0.1f64.ln() + 8.0 * 0.9f64.ln();
        assert!((ch.log_probability(&two).unwrap() - want).abs() < 1e-12);
        let awgn = ChannelModel::awgn(0.8).unwrap();
        assert_eq!(awgn.log_probability(&ChannelOutput::Awgn(vec![1.0; 4])).unwrap(), 0.0);
    }

    #[test]
    fn sampling_is_deterministic() {
        for ch in [ChannelModel::bsc(0.05).unwrap(), ChannelModel::awgn(0.7).unwrap()] {
            let a = ch.sample_zero_codeword(50, &mut seeded_rng(7));
            let b = ch.sample_zero_codeword(50, &mut seeded_rng(7));
            assert_eq!(a, b);
        }
    }

    #[test]
    fn bsc_flip_statistics() {
        // 10^5 samples of length 20 at eps = 0.05: total flips ~ Binomial(2e6, 0.05)
        let ch = ChannelModel::bsc(0.05).unwrap();
        let mut rng = seeded_rng(11);
        let (samples, n) = (100_000usize, 20usize);
        let flips: usize = (0..samples)
            .map(|_| match ch.sample_zero_codeword(n, &mut rng) {
                ChannelOutput::Bsc(y) => y.weight(),
                _ => unreachable!(),
            })
            .sum();
        let trials = (samples * n) as f64;
        let mean = trials * 0.05;
        let sd = (trials * 0.05 * 0.95).sqrt();
        assert!((flips as f64 - mean).abs() < 3.0 * sd, "flips {flips} vs {mean} +- {sd}");
    }

    #[test]
    fn awgn_mean_statistics() {
        let sigma = 0.8;
        let ch = ChannelModel::awgn(sigma).unwrap();
        let mut rng = seeded_rng(3);
        let (samples, n) = (100_000usize, 4usize);
        let mut total = 0.0;
        for _ in 0..samples {
            if let ChannelOutput::Awgn(y) = ch.sample_zero_codeword(n, &mut rng) {
                total += y.iter().sum::<f64>();
            }
        }
        let mean = total / (samples * n) as f64;
        let bound = 3.0 * sigma / ((samples * n) as f64).sqrt();
        assert!((mean - 1.0).abs() < bound, "mean {mean}");
    }

    #[test]
    fn ebn0_round_trip() {
        let ch = ChannelModel::awgn_from_ebn0_db(4.0, 64.0 / 155.0).unwrap();
        let ChannelModel::Awgn { sigma } = ch else { unreachable!() };
        assert!((ebn0_db(sigma, 64.0 / 155.0) - 4.0).abs() < 1e-12);
    }
}
