//! Critical numbers of trapping sets under Gallager decoding.

use crate::code_model::{induced_check_degrees, BinaryVector, TannerGraph};
use crate::error::{Error, Result};
use crate::iter_decode::{extract_trapping_set, IterConfig, DEFAULT_WINDOW};
use serde::{Deserialize, Serialize};

pub const DEFAULT_SIZE_CAP: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalNumber {
    /// Smallest failing subset size, if found within the cap.
    pub value: Option<usize>,
    pub witness: Option<BinaryVector>,
    /// Every size below this was tried without success.
    pub lower_bound: usize,
}

/// `ts` grown by every outside variable with more than half of its checks
/// among the odd checks of the current set, until no variable qualifies.
/// Majority-rule decoders drive such variables into the trapping set, so a
/// failure is attributed to `ts` when it stays inside this closure.
pub fn trapping_closure(g: &TannerGraph, ts: &[usize]) -> Vec<usize> {
    let mut set: Vec<usize> = ts.to_vec();
    set.sort_unstable();
    set.dedup();
    loop {
        let mut odd = vec![false; g.m()];
        for (c, d) in induced_check_degrees(g, &set) {
            odd[c] = d % 2 == 1;
        }
        let grow: Vec<usize> = (0..g.n())
            .filter(|v| set.binary_search(v).is_err())
            .filter(|&v| 2 * g.var_neighbors(v).iter().filter(|&&c| odd[c]).count() > g.var_degree(v))
            .collect();
        if grow.is_empty() {
            return set;
        }
        set.extend(grow);
        set.sort_unstable();
    }
}

fn combinations(k: usize, n: usize, visit: &mut dyn FnMut(&[usize]) -> Result<bool>) -> Result<bool> {
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if visit(&idx)? {
            return Ok(true);
        }
        let Some(pos) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return Ok(false);
        };
        idx[pos] += 1;
        for i in pos + 1..k {
            idx[i] = idx[i - 1] + 1;
        }
    }
}

/// Smallest `k <= size_cap` such that flipping some `k` bits of `ts` (all
/// others correct) makes the decoder fail with its trapping set inside the
/// closure of `ts`. Subsets are tried in lexicographic order.
pub fn critical_number_search(g: &TannerGraph, ts: &[usize], cfg: &IterConfig, size_cap: usize) -> Result<CriticalNumber> {
    if ts.is_empty() || ts.iter().any(|&v| v >= g.n()) {
        return Err(Error::InvalidParameter("trapping set must be a nonempty set of variables".into()));
    }
    let mut ts = ts.to_vec();
    ts.sort_unstable();
    ts.dedup();
    let closure = trapping_closure(g, &ts);
    let cap = size_cap.min(ts.len());
    for k in 1..=cap {
        let mut witness = None;
        combinations(k, ts.len(), &mut |idx| {
            let y = BinaryVector::from_support(g.n(), idx.iter().map(|&i| ts[i]))?;
            let llr = crate::channel::LlrVector::from_bsc_magnitude(&y, 1.0);
            let trace = cfg.decode_llr(g, &llr)?;
            if !trace.is_failure() {
                return Ok(false);
            }
            let t = extract_trapping_set(&trace, g, DEFAULT_WINDOW)?;
            if t.support.iter().all(|v| closure.binary_search(v).is_ok()) {
                witness = Some(y);
                return Ok(true);
            }
            Ok(false)
        })?;
        if witness.is_some() {
            return Ok(CriticalNumber { value: Some(k), witness, lower_bound: k });
        }
    }
    Ok(CriticalNumber { value: None, witness: None, lower_bound: cap + 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_in_order() {
        let mut all = Vec::new();
        combinations(2, 4, &mut |c| {
            all.push(c.to_vec());
            Ok(false)
        })
        .unwrap();
        assert_eq!(all, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
    }

    #[test]
    fn closure_of_codeword_support_is_itself() {
        // A 4-cycle code: variables 0,1 share both checks.
        let g = TannerGraph::from_check_neighbors(3, vec![vec![0, 1, 2], vec![0, 1]]).unwrap();
        assert_eq!(trapping_closure(&g, &[0, 1]), vec![0, 1]);
        // {0}: both checks odd, so 1 and the degree-1 variable 2 join.
        assert_eq!(trapping_closure(&g, &[0]), vec![0, 1, 2]);
    }
}
