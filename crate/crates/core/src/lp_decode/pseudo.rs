//! Re-scaled pseudo-codewords and their weights.

use crate::channel::LlrVector;
use crate::code_model::BinaryVector;
use crate::error::{expect_len, Error, Result};
use serde::{Deserialize, Serialize};

/// Tolerance for the equality case of the BSC weight.
const HALF_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PseudoCodeword(Vec<f64>);

impl PseudoCodeword {
    pub fn new(f: Vec<f64>) -> Result<Self> {
        if let Some(x) = f.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::InvalidParameter(format!("pseudo-codeword entry {x} outside [0, 1]")));
        }
        Ok(Self(f))
    }

    pub(crate) fn new_unchecked(f: Vec<f64>) -> Self {
        Self(f)
    }

    pub fn from_binary(v: &BinaryVector) -> Self {
        Self(v.to_bits().into_iter().map(|b| if b { 1.0 } else { 0.0 }).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0.0)
    }

    /// Support of components above `tol`.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.0[i] > tol).collect()
    }

    /// L-infinity distance.
    pub fn distance(&self, other: &PseudoCodeword) -> Result<f64> {
        expect_len(self.len(), other.len())?;
        Ok(self.0.iter().zip(&other.0).fold(0.0, |a, (x, y)| a.max((x - y).abs())))
    }

    pub fn w_bsc(&self) -> Result<usize> {
        w_bsc(self)
    }

    pub fn w_awgn(&self) -> Result<f64> {
        w_awgn(self)
    }

    pub fn median(&self) -> Result<BinaryVector> {
        median(self)
    }

    /// Indices ordered by decreasing value, ties by lowest index.
    fn ranked(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| self.0[b].total_cmp(&self.0[a]).then(a.cmp(&b)));
        idx
    }
}

pub fn cost(gamma: &LlrVector, p: &PseudoCodeword) -> Result<f64> {
    expect_len(gamma.len(), p.len())?;
    Ok(gamma.values().iter().zip(p.values()).map(|(g, x)| g * x).sum())
}

/// BSC weight: with `e` the fewest largest components reaching half the
/// total, `2e` on equality and `2e - 1` when strictly above.
pub fn w_bsc(p: &PseudoCodeword) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::ZeroVector);
    }
    let half = p.values().iter().sum::<f64>() / 2.0;
    let tol = HALF_TOL * half.max(1.0);
    let mut acc = 0.0;
    for (k, &i) in p.ranked().iter().enumerate() {
        acc += p.values()[i];
        if acc >= half - tol {
            let e = k + 1;
            return Ok(if (acc - half).abs() <= tol { 2 * e } else { 2 * e - 1 });
        }
    }
    unreachable!("partial sums reach the total")
}

pub fn w_awgn(p: &PseudoCodeword) -> Result<f64> {
    if p.is_zero() {
        return Err(Error::ZeroVector);
    }
    let s: f64 = p.values().iter().sum();
    let s2: f64 = p.values().iter().map(|x| x * x).sum();
    Ok(s * s / s2)
}

/// Binary vector on the `ceil((w_bsc + 1) / 2)` largest components.
pub fn median(p: &PseudoCodeword) -> Result<BinaryVector> {
    let w = w_bsc(p)?;
    let e = w.div_ceil(2) + usize::from(w % 2 == 0);
    BinaryVector::from_support(p.len(), p.ranked().into_iter().take(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pc(v: &[f64]) -> PseudoCodeword {
        PseudoCodeword::new(v.to_vec()).unwrap()
    }

    #[test]
    fn cost_examples() {
        let g = LlrVector::new(vec![1.0, -2.0]).unwrap();
        assert_eq!(cost(&g, &pc(&[0.0, 0.0])).unwrap(), 0.0);
        assert_eq!(cost(&g, &pc(&[0.5, 0.5])).unwrap(), -0.5);
        assert!(cost(&g, &pc(&[0.5])).is_err());
    }

    #[test]
    fn weights_of_codeword_indicators() {
        for d in 1..10 {
            let mut v = vec![0.0; 12];
            v[..d].iter_mut().for_each(|x| *x = 1.0);
            let p = pc(&v);
            assert_eq!(w_bsc(&p).unwrap(), d);
            assert_eq!(w_awgn(&p).unwrap(), d as f64);
        }
    }

    #[test]
    fn fractional_example() {
        let p = pc(&[1.0, 1.0, 0.5, 0.5, 0.5]);
        assert_eq!(w_bsc(&p).unwrap(), 3);
        assert_eq!(median(&p).unwrap().support(), &[0, 1]);
        assert!((w_awgn(&pc(&[1.0, 0.5])).unwrap() - 1.8).abs() < 1e-15);
    }

    #[test]
    fn odd_codeword_median_takes_lowest_indices() {
        let p = pc(&[0.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0]);
        assert_eq!(median(&p).unwrap().support(), &[1, 2, 4]);
    }

    #[test]
    fn zero_vector_errors() {
        let p = pc(&[0.0; 4]);
        assert_eq!(w_bsc(&p), Err(Error::ZeroVector));
        assert_eq!(w_awgn(&p), Err(Error::ZeroVector));
        assert_eq!(median(&p), Err(Error::ZeroVector));
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(PseudoCodeword::new(vec![1.5]).is_err());
    }
}
