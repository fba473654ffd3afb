use super::layout::EdgeLayout;
use super::{DecodeTrace, IterConfig};
use crate::code_model::{BinaryVector, TannerGraph};
use crate::error::{Error, Result};

/// Gallager A/B decoding of a hard-decision input.
///
/// The end-of-iteration decision is a majority vote over all incoming
/// check messages, with the received bit breaking exact ties.
pub fn gallager_decode(g: &TannerGraph, received: &BinaryVector, cfg: &IterConfig) -> Result<DecodeTrace> {
    if !cfg.algorithm.is_hard_decision() {
        return Err(Error::InvalidParameter(format!(
            "{} is not a Gallager decoder",
            cfg.algorithm.name()
        )));
    }
    cfg.validate()?;
    g.expect_len(received.len())?;
    let layout = EdgeLayout::new(g);
    let y = received.to_bits();

    // Thresholds per (iteration, distinct degree) are resolved up front so a
    // missing table entry fails before any decoding work.
    let mut degrees: Vec<usize> = (0..g.n()).map(|v| g.var_degree(v)).collect();
    degrees.sort_unstable();
    degrees.dedup();
    let max_degree = degrees.last().copied().unwrap_or(0);
    let mut thresholds = vec![vec![0usize; max_degree + 1]; cfg.max_iterations + 1];
    for k in 1..=cfg.max_iterations {
        for &d in degrees.iter().filter(|&&d| d >= 2) {
            thresholds[k][d] = cfg.threshold(k, d)?;
        }
    }

    let mut to_check: Vec<bool> = layout.edge_var.iter().map(|&v| y[v]).collect();
    let mut to_var = vec![false; to_check.len()];
    let mut decisions = vec![received.clone()];
    if cfg.halt_on_codeword && g.is_codeword_bits(&y) {
        return Ok(DecodeTrace::finish(g, cfg, decisions, Some(0)));
    }

    let mut x = vec![false; g.n()];
    for k in 1..=cfg.max_iterations {
        for c in 0..layout.checks() {
            let edges = layout.check_edges(c);
            let parity = to_check[edges.clone()].iter().fold(false, |p, &b| p ^ b);
            for e in edges {
                to_var[e] = parity ^ to_check[e];
            }
        }
        for v in 0..g.n() {
            let edges = &layout.var_edges[v];
            let d = edges.len();
            let ones = edges.iter().filter(|&&e| to_var[e]).count();
            if d >= 2 {
                let b = thresholds[k][d];
                for &e in edges {
                    let ext_ones = ones - to_var[e] as usize;
                    let ext_zeros = d - 1 - ext_ones;
                    to_check[e] = if ext_ones >= b {
                        true
                    } else if ext_zeros >= b {
                        false
                    } else {
                        y[v]
                    };
                }
            } else {
                for &e in edges {
                    to_check[e] = y[v];
                }
            }
            x[v] = match (2 * ones).cmp(&d) {
                std::cmp::Ordering::Greater => true,
                std::cmp::Ordering::Less => false,
                std::cmp::Ordering::Equal => y[v],
            };
        }
        decisions.push(BinaryVector::from_bits(&x));
        if cfg.halt_on_codeword && g.is_codeword_bits(&x) {
            return Ok(DecodeTrace::finish(g, cfg, decisions, Some(k)));
        }
    }
    Ok(DecodeTrace::finish(g, cfg, decisions, None))
}
