//! Quasi-cyclic codes from circulant permutation blocks, and the
//! [155,64,20] Tanner code.

use super::TannerGraph;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Array of `block_size x block_size` circulant permutation matrices.
///
/// Block `(i, j)` with shift `s` connects check `i * L + r` to variable
/// `j * L + (r + s) mod L`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CirculantSpec {
    pub block_size: usize,
    pub shifts: Vec<Vec<usize>>,
}

impl CirculantSpec {
    /// Shift exponents of the Tanner code: `5^i * 2^j mod 31`.
    pub fn tanner_155() -> Self {
        let block_size = 31;
        let shifts = (0..3)
            .map(|i| (0..5).map(|j| (5usize.pow(i) << j) % block_size).collect())
            .collect();
        Self { block_size, shifts }
    }

    pub fn to_graph(&self) -> Result<TannerGraph> {
        let l = self.block_size;
        if l == 0 {
            return Err(Error::InvalidParameter("block size must be positive".into()));
        }
        let cols = self.shifts.first().map_or(0, Vec::len);
        if self.shifts.iter().any(|row| row.len() != cols) {
            return Err(Error::InvalidParameter("ragged shift matrix".into()));
        }
        if let Some(&s) = self.shifts.iter().flatten().find(|&&s| s >= l) {
            return Err(Error::InvalidParameter(format!("shift {s} not below block size {l}")));
        }
        let mut checks = Vec::with_capacity(self.shifts.len() * l);
        for row in &self.shifts {
            for r in 0..l {
                checks.push(row.iter().enumerate().map(|(j, &s)| j * l + (r + s) % l).collect());
            }
        }
        TannerGraph::from_check_neighbors(cols * l, checks)
    }
}

/// The (3,5)-regular Tanner code of length 155.
///
/// # Panics
///
/// If the assembled graph is not (3,5)-regular with girth 8 and rank 91;
/// that would mean the shift table above is wrong.
pub fn build_tanner_155() -> TannerGraph {
    let g = CirculantSpec::tanner_155().to_graph().expect("valid circulant spec");
    assert_eq!((g.n(), g.m()), (155, 93));
    assert_eq!(g.uniform_var_degree(), Some(3));
    assert_eq!(g.uniform_check_degree(), Some(5));
    assert_eq!(g.girth(), Some(8), "Tanner code girth");
    assert_eq!(g.gf2_rank(), 91, "Tanner code rank");
    g
}
