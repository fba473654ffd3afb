use super::layout::EdgeLayout;
use super::{Algorithm, DecodeTrace, IterConfig};
use crate::channel::LlrVector;
use crate::code_model::{BinaryVector, TannerGraph};
use crate::error::{Error, Result};

/// Magnitude cap applied to BP variable-to-check messages before `tanh`.
pub const BP_CLIP: f64 = 30.0;

/// Sum-product decoding. Check messages use the tanh rule with messages
/// clipped to `|w| <= 30`; a zero posterior LLR decodes to 1.
pub fn bp_decode(g: &TannerGraph, llr: &LlrVector, cfg: &IterConfig) -> Result<DecodeTrace> {
    soft_decode(g, llr, cfg, Algorithm::Bp)
}

/// Min-sum decoding: minimum extrinsic magnitude times the product of
/// extrinsic signs.
pub fn min_sum_decode(g: &TannerGraph, llr: &LlrVector, cfg: &IterConfig) -> Result<DecodeTrace> {
    soft_decode(g, llr, cfg, Algorithm::MinSum)
}

fn soft_decode(g: &TannerGraph, llr: &LlrVector, cfg: &IterConfig, algorithm: Algorithm) -> Result<DecodeTrace> {
    if cfg.algorithm != algorithm {
        return Err(Error::InvalidParameter(format!(
            "config is for {}, decoder is {}",
            cfg.algorithm.name(),
            algorithm.name()
        )));
    }
    cfg.validate()?;
    g.expect_len(llr.len())?;
    let gamma = llr.values();
    let layout = EdgeLayout::new(g);

    let decide = |m: f64| m <= 0.0;
    let mut x: Vec<bool> = gamma.iter().map(|&v| decide(v)).collect();
    let mut decisions = vec![BinaryVector::from_bits(&x)];
    if cfg.halt_on_codeword && g.is_codeword_bits(&x) {
        return Ok(DecodeTrace::finish(g, cfg, decisions, Some(0)));
    }

    let mut to_check: Vec<f64> = layout.edge_var.iter().map(|&v| gamma[v]).collect();
    let mut to_var = vec![0.0; to_check.len()];
    let mut scratch = Vec::new();
    for k in 1..=cfg.max_iterations {
        for c in 0..layout.checks() {
            let edges = layout.check_edges(c);
            match algorithm {
                Algorithm::Bp => bp_check(&to_check[edges.clone()], &mut to_var[edges], &mut scratch),
                _ => min_sum_check(&to_check[edges.clone()], &mut to_var[edges]),
            }
        }
        for v in 0..g.n() {
            let edges = &layout.var_edges[v];
            let mut total = gamma[v];
            for &e in edges {
                total += to_var[e];
            }
            for &e in edges {
                // Extrinsic sums are formed directly (not total - own) so that
                // infinite min-sum messages never produce NaN.
                let mut ext = gamma[v];
                for &o in edges {
                    if o != e {
                        ext += to_var[o];
                    }
                }
                to_check[e] = ext;
            }
            x[v] = decide(total);
        }
        decisions.push(BinaryVector::from_bits(&x));
        if cfg.halt_on_codeword && g.is_codeword_bits(&x) {
            return Ok(DecodeTrace::finish(g, cfg, decisions, Some(k)));
        }
    }
    Ok(DecodeTrace::finish(g, cfg, decisions, None))
}

fn bp_check(incoming: &[f64], out: &mut [f64], t: &mut Vec<f64>) {
    let d = incoming.len();
    t.clear();
    t.extend(incoming.iter().map(|&w| (0.5 * w.clamp(-BP_CLIP, BP_CLIP)).tanh()));
    // out[i] = 2 atanh(prod_{j != i} t_j) from prefix and suffix products.
    let limit = (0.5 * BP_CLIP).tanh();
    let mut prefix = 1.0;
    for i in 0..d {
        out[i] = prefix;
        prefix *= t[i];
    }
    let mut suffix = 1.0;
    for i in (0..d).rev() {
        let p = (out[i] * suffix).clamp(-limit, limit);
        out[i] = 2.0 * p.atanh();
        suffix *= t[i];
    }
}

fn min_sum_check(incoming: &[f64], out: &mut [f64]) {
    let mut min1 = f64::INFINITY;
    let mut min2 = f64::INFINITY;
    let mut arg = usize::MAX;
    let mut negative = false;
    for (i, &w) in incoming.iter().enumerate() {
        let a = w.abs();
        if a < min1 {
            min2 = min1;
            min1 = a;
            arg = i;
        } else if a < min2 {
            min2 = a;
        }
        negative ^= w < 0.0;
    }
    for (i, &w) in incoming.iter().enumerate() {
        let mag = if i == arg { min2 } else { min1 };
        let neg = negative ^ (w < 0.0);
        out[i] = if neg { -mag } else { mag };
    }
}
