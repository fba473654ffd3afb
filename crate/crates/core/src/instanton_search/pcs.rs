//! Pseudo-codeword search for LP decoding over the AWGN channel.

use super::{Attribution, ChannelKind, InstantonRecord, Representation, SearchInfo, SearchParams, DELTA};
use crate::channel::LlrVector;
use crate::error::{Error, Result};
use crate::lp_decode::{LcLpInstance, PseudoCodeword, TAU_INT};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

pub const PCS_STEP_CAP: usize = 100;
/// Initial noise deviation that makes most Tanner-155 starts fail; much
/// smaller values rarely leave the zero codeword's decoding region.
pub const PCS_DEFAULT_STRENGTH: f64 = 1.1;

/// Minimum-norm noise `n` on the hyperplane `Σ p_i (1 - n_i) = 0`, where
/// the zero codeword and `p` are equally likely:
/// `n = p Σp / Σp²`, so that `‖n‖² = w_awgn(p)`.
pub fn awgn_instanton_from_pcw(p: &PseudoCodeword) -> Result<Vec<f64>> {
    if p.is_zero() {
        return Err(Error::ZeroVector);
    }
    let s: f64 = p.values().iter().sum();
    let s2: f64 = p.values().iter().map(|x| x * x).sum();
    Ok(p.values().iter().map(|x| x * s / s2).collect())
}

fn decode(inst: &LcLpInstance, yhat: &[f64]) -> Result<PseudoCodeword> {
    Ok(inst.solve(&LlrVector::new(yhat.to_vec())?)?.pseudo_codeword)
}

/// PCS from a given channel output. Returns an error if `yhat` decodes to
/// the zero codeword.
pub fn pcs_from_input(inst: &LcLpInstance, yhat: &[f64]) -> Result<InstantonRecord> {
    let mut p = decode(inst, yhat)?;
    if p.is_zero() {
        return Err(Error::NotAFailure);
    }
    let mut trajectory = vec![p.w_awgn()?];
    for step in 1..=PCS_STEP_CAP {
        let noise = awgn_instanton_from_pcw(&p)?;
        let next_input: Vec<f64> = noise.iter().map(|x| 1.0 - (1.0 + DELTA) * x).collect();
        let next = decode(inst, &next_input)?;
        if next.is_zero() {
            return Err(Error::Solver("nudged instanton decoded to the zero codeword".into()));
        }
        if next.distance(&p)? < TAU_INT {
            return Ok(InstantonRecord {
                channel: ChannelKind::Awgn,
                decoder: "lp".into(),
                weight: noise.iter().map(|x| x * x).sum(),
                representation: Representation::Noise(noise),
                attribution: Attribution::PseudoCodeword(p),
                search: SearchInfo {
                    method: "pcs".into(),
                    seed: None,
                    steps: step,
                    weight_trajectory: trajectory,
                    params: SearchParams::default(),
                },
            });
        }
        p = next;
        trajectory.push(p.w_awgn()?);
    }
    Err(Error::NotConverged { steps: PCS_STEP_CAP })
}

/// PCS from Gaussian noise of standard deviation `initial_noise_strength`
/// added to the all-ones channel output, redrawn until the LP decoder
/// fails (at most `ISA_RETRY_CAP` draws).
pub fn pcs_awgn_lp<R: Rng + ?Sized>(inst: &LcLpInstance, initial_noise_strength: f64, rng: &mut R) -> Result<InstantonRecord> {
    if !(initial_noise_strength > 0.0 && initial_noise_strength.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise strength {initial_noise_strength} must be positive")));
    }
    for _ in 0..super::ISA_RETRY_CAP {
        let yhat: Vec<f64> = (0..inst.n())
            .map(|_| {
                let z: f64 = StandardNormal.sample(rng);
                1.0 + initial_noise_strength * z
            })
            .collect();
        match pcs_from_input(inst, &yhat) {
            Err(Error::NotAFailure) => continue,
            other => return other,
        }
    }
    Err(Error::RetryCapExceeded(super::ISA_RETRY_CAP))
}

/// Parallel PCS runs; run `k` uses seed `base_seed + k`.
pub fn pcs_multi_start(inst: &LcLpInstance, initial_noise_strength: f64, runs: usize, base_seed: u64) -> Vec<Result<InstantonRecord>> {
    (0..runs as u64)
        .into_par_iter()
        .map(|k| {
            let seed = base_seed.wrapping_add(k);
            let mut rng = crate::seeded_rng(seed);
            pcs_awgn_lp(inst, initial_noise_strength, &mut rng).map(|mut r| {
                r.search.seed = Some(seed);
                r
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp_decode::cost;

    #[test]
    fn projection_examples() {
        let p = PseudoCodeword::new(vec![1.0, 0.5]).unwrap();
        let n = awgn_instanton_from_pcw(&p).unwrap();
        assert!((n[0] - 1.2).abs() < 1e-15 && (n[1] - 0.6).abs() < 1e-15);
        let norm: f64 = n.iter().map(|x| x * x).sum();
        assert!((norm - 1.8).abs() < 1e-12);

        let c = PseudoCodeword::new(vec![1.0, 0.0, 1.0, 1.0]).unwrap();
        assert_eq!(awgn_instanton_from_pcw(&c).unwrap(), vec![1.0, 0.0, 1.0, 1.0]);
        assert_eq!(awgn_instanton_from_pcw(&PseudoCodeword::new(vec![0.0; 3]).unwrap()), Err(Error::ZeroVector));
    }

    /// Minimizing ‖n‖² on the hyperplane by gradient projection lands on the
    /// closed form.
    #[test]
    fn projection_matches_numeric_minimization() {
        let p = PseudoCodeword::new(vec![0.9, 0.3, 0.6, 0.1]).unwrap();
        let closed = awgn_instanton_from_pcw(&p).unwrap();
        let a = p.values();
        let s: f64 = a.iter().sum();
        let aa: f64 = a.iter().map(|x| x * x).sum();
        // Start on the hyperplane a·n = s and descend along the projected gradient.
        let mut n = vec![1.0; 4];
        let scale = s / a.iter().zip(&n).map(|(x, y)| x * y).sum::<f64>();
        n.iter_mut().for_each(|v| *v *= scale);
        for _ in 0..2000 {
            let g: Vec<f64> = n.iter().map(|v| 2.0 * v).collect();
            let along: f64 = g.iter().zip(a).map(|(x, y)| x * y).sum::<f64>() / aa;
            for k in 0..4 {
                n[k] -= 0.1 * (g[k] - along * a[k]);
            }
        }
        for k in 0..4 {
            assert!((n[k] - closed[k]).abs() < 1e-9);
        }
    }

    #[test]
    fn nudged_instanton_fails() {
        let p = PseudoCodeword::new(vec![1.0, 0.5, 0.25, 0.0]).unwrap();
        let n = awgn_instanton_from_pcw(&p).unwrap();
        let y: Vec<f64> = n.iter().map(|x| 1.0 - (1.0 + DELTA) * x).collect();
        assert!(cost(&LlrVector::new(y).unwrap(), &p).unwrap() < 0.0);
    }
}
