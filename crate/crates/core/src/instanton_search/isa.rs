//! Instanton search for LP decoding over the BSC.

use super::{Attribution, ChannelKind, InstantonRecord, Representation, SearchInfo, SearchParams};
use crate::channel::LlrVector;
use crate::code_model::BinaryVector;
use crate::error::{Error, Result};
use crate::lp_decode::{LcLpInstance, PseudoCodeword};
use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;

pub const ISA_RETRY_CAP: usize = 50;

fn decode(inst: &LcLpInstance, y: &BinaryVector) -> Result<PseudoCodeword> {
    Ok(inst.solve(&LlrVector::from_bsc_magnitude(y, 1.0))?.pseudo_codeword)
}

/// One ISA run from `flips` random flipped bits.
///
/// Each step decodes the median of the current pseudo-codeword. A lighter
/// output becomes the next pseudo-codeword. Otherwise the leave-one-out
/// subsets of the median are decoded in ascending order of the removed
/// index; the first nonzero output becomes the next pseudo-codeword, and if
/// all of them decode to zero the median is returned as the instanton.
pub fn isa_bsc_lp<R: Rng + ?Sized>(inst: &LcLpInstance, flips: usize, rng: &mut R) -> Result<InstantonRecord> {
    let n = inst.n();
    if flips == 0 || flips > n {
        return Err(Error::InvalidParameter(format!("flip count {flips} not in 1..={n}")));
    }
    let mut p = None;
    for _ in 0..ISA_RETRY_CAP {
        let r = BinaryVector::from_support(n, sample(rng, n, flips).into_vec())?;
        let out = decode(inst, &r)?;
        if !out.is_zero() {
            p = Some(out);
            break;
        }
    }
    let mut p = p.ok_or(Error::RetryCapExceeded(ISA_RETRY_CAP))?;
    let mut trajectory = vec![p.w_bsc()? as f64];

    for step in 1..=n {
        let m = p.median()?;
        let p_m = decode(inst, &m)?;
        let w = p.w_bsc()?;
        if !p_m.is_zero() && p_m.w_bsc()? < w {
            p = p_m;
            trajectory.push(p.w_bsc()? as f64);
            continue;
        }
        let mut next = None;
        for &i in m.support() {
            let out = decode(inst, &m.without(i))?;
            if !out.is_zero() {
                next = Some(out);
                break;
            }
        }
        match next {
            Some(out) => {
                p = out;
                trajectory.push(p.w_bsc()? as f64);
            }
            None => {
                let attribution = if p_m.is_zero() { p } else { p_m };
                return Ok(InstantonRecord {
                    channel: ChannelKind::Bsc,
                    decoder: "lp".into(),
                    weight: m.weight() as f64,
                    representation: Representation::Binary(m),
                    attribution: Attribution::PseudoCodeword(attribution),
                    search: SearchInfo {
                        method: "isa".into(),
                        seed: None,
                        steps: step,
                        weight_trajectory: trajectory,
                        params: SearchParams { step_cap: n, ..SearchParams::default() },
                    },
                });
            }
        }
    }
    Err(Error::NotConverged { steps: n })
}

/// Runs `runs` independent ISA searches in parallel; run `k` uses seed
/// `base_seed + k`, so results do not depend on the thread count.
pub fn isa_multi_start(inst: &LcLpInstance, flips: usize, runs: usize, base_seed: u64) -> Vec<Result<InstantonRecord>> {
    (0..runs as u64)
        .into_par_iter()
        .map(|k| {
            let seed = base_seed.wrapping_add(k);
            let mut rng = crate::seeded_rng(seed);
            isa_bsc_lp(inst, flips, &mut rng).map(|mut r| {
                r.search.seed = Some(seed);
                r
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code_model::TannerGraph;
    use crate::instanton_search::{verify_instanton, Decoder};
    use crate::lp_decode::build_lclp;

    /// Three disjoint [3,1] repetition blocks: one flip per block is
    /// corrected, two flips in one block are not.
    #[test]
    fn isa_on_repetition_blocks() {
        let mut checks = Vec::new();
        for b in 0..3 {
            checks.push(vec![3 * b, 3 * b + 1]);
            checks.push(vec![3 * b + 1, 3 * b + 2]);
        }
        let g = TannerGraph::from_check_neighbors(9, checks).unwrap();
        let inst = build_lclp(&g).unwrap();
        let mut rng = crate::seeded_rng(3);
        let rec = isa_bsc_lp(&inst, 6, &mut rng).unwrap();
        assert_eq!(rec.weight, 2.0);
        assert!(verify_instanton(&Decoder::Lp(&inst), rec.binary().unwrap()).unwrap());
        let t = &rec.search.weight_trajectory;
        assert!(t.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn rejects_bad_flip_count() {
        let g = TannerGraph::from_check_neighbors(3, vec![vec![0, 1, 2]]).unwrap();
        let inst = build_lclp(&g).unwrap();
        assert!(isa_bsc_lp(&inst, 0, &mut crate::seeded_rng(0)).is_err());
    }
}
