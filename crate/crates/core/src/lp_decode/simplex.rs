//! Revised primal simplex on equality-form LPs `min c^T x, A x = b, x >= 0`.
//!
//! The basis inverse is held densely (column-major) and updated with
//! product-form pivots. Every row owns an artificial column fixed at zero;
//! artificials never re-enter once they leave the basis. Pricing is
//! Dantzig's rule, falling back to Bland's rule after a run of degenerate
//! pivots and returning to Dantzig after the next nondegenerate one.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

const PIVOT_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const RATIO_TIE: f64 = 1e-12;
const DEGENERATE_RUN: usize = 50;
const REFACTOR_EVERY: usize = 1000;
const PERTURBATION: f64 = 1e-7;
const FEAS_TOL: f64 = 1e-10;

/// Sparse column storage (CSC).
#[derive(Debug, Clone, Default)]
pub struct SparseColumns {
    starts: Vec<usize>,
    rows: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseColumns {
    pub fn new() -> Self {
        Self { starts: vec![0], rows: Vec::new(), vals: Vec::new() }
    }

    pub fn push_column(&mut self, entries: impl IntoIterator<Item = (usize, f64)>) {
        for (r, v) in entries {
            self.rows.push(r);
            self.vals.push(v);
        }
        self.starts.push(self.rows.len());
    }

    pub fn len(&self) -> usize {
        self.starts.len() - 1
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.starts[j]..self.starts[j + 1];
        self.rows[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SolverStats {
    pub pivots: usize,
    pub degenerate_pivots: usize,
    pub bland_pivots: usize,
    pub dual_pivots: usize,
    pub refactorizations: usize,
}

/// A basis with its inverse and primal values. Basic entries `>= ncols`
/// denote the artificial column of row `entry - ncols`.
#[derive(Debug, Clone)]
pub struct Basis {
    basic: Vec<usize>,
    binv: Vec<f64>,
    x_b: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct StandardLp {
    nrows: usize,
    cols: SparseColumns,
    rhs: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub x: Vec<f64>,
    pub stats: SolverStats,
}

impl StandardLp {
    pub fn new(nrows: usize, cols: SparseColumns, rhs: Vec<f64>) -> Self {
        assert_eq!(rhs.len(), nrows);
        Self { nrows, cols, rhs }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    fn column_entries(&self, j: usize) -> Vec<(usize, f64)> {
        if j < self.ncols() {
            self.cols.column(j).collect()
        } else {
            vec![(j - self.ncols(), 1.0)]
        }
    }

    /// Builds a basis from columns forming an identity matrix (caller
    /// guarantees it, and that `rhs >= 0` with zero rhs on artificial rows),
    /// then pivots artificials out wherever a structural column can replace
    /// them. Pivots are degenerate, so the basic solution is unchanged.
    pub fn identity_basis(&self, basic: Vec<usize>) -> Basis {
        let m = self.nrows;
        let mut binv = vec![0.0; m * m];
        for r in 0..m {
            binv[r * m + r] = 1.0;
        }
        let mut basis = Basis { basic, binv, x_b: self.rhs.clone() };
        let mut in_basis = vec![false; self.ncols()];
        for &j in &basis.basic {
            if j < self.ncols() {
                in_basis[j] = true;
            }
        }
        let mut rho = vec![0.0; m];
        let mut alpha = vec![0.0; m];
        for r in 0..m {
            if basis.basic[r] < self.ncols() {
                continue;
            }
            for (c, v) in rho.iter_mut().enumerate() {
                *v = basis.binv[c * m + r];
            }
            let mut best: Option<(usize, f64)> = None;
            for j in (0..self.ncols()).filter(|&j| !in_basis[j]) {
                let a: f64 = self.cols.column(j).map(|(row, v)| rho[row] * v).sum();
                if a.abs() > 1e-6 && best.is_none_or(|(_, b)| a.abs() > b.abs() + 1e-12) {
                    best = Some((j, a));
                }
            }
            if let Some((j, _)) = best {
                self.ftran(&basis, j, &mut alpha);
                let nz: Vec<usize> = (0..m).filter(|&i| alpha[i] != 0.0).collect();
                pivot(&mut basis, m, r, &alpha, &nz, 0.0);
                basis.basic[r] = j;
                in_basis[j] = true;
            }
        }
        basis
    }

    fn ftran(&self, basis: &Basis, j: usize, alpha: &mut [f64]) {
        let m = self.nrows;
        alpha.iter_mut().for_each(|a| *a = 0.0);
        for (row, v) in self.column_entries(j) {
            let col = &basis.binv[row * m..(row + 1) * m];
            for (a, &b) in alpha.iter_mut().zip(col) {
                *a += v * b;
            }
        }
    }

    fn duals(&self, basis: &Basis, cost: &[f64], y: &mut [f64]) {
        let m = self.nrows;
        let c_b: Vec<f64> = basis.basic.iter().map(|&j| if j < cost.len() { cost[j] } else { 0.0 }).collect();
        for (c, yc) in y.iter_mut().enumerate() {
            *yc = basis.binv[c * m..(c + 1) * m].iter().zip(&c_b).map(|(a, b)| a * b).sum();
        }
    }

    /// Recomputes the basis inverse from scratch by Gauss-Jordan elimination
    /// with partial pivoting, and the basic values for `rhs`.
    fn refactor(&self, basis: &mut Basis, rhs: &[f64]) -> Result<()> {
        let m = self.nrows;
        // Row-major dense B augmented with identity.
        let w = 2 * m;
        let mut a = vec![0.0; m * w];
        for (k, &j) in basis.basic.iter().enumerate() {
            for (row, v) in self.column_entries(j) {
                a[row * w + k] = v;
            }
        }
        for r in 0..m {
            a[r * w + m + r] = 1.0;
        }
        for col in 0..m {
            let p = (col..m)
                .max_by(|&x, &y| a[x * w + col].abs().total_cmp(&a[y * w + col].abs()))
                .expect("nonempty");
            if a[p * w + col].abs() < 1e-12 {
                return Err(Error::Solver("singular basis during refactorization".into()));
            }
            if p != col {
                for k in 0..w {
                    a.swap(p * w + k, col * w + k);
                }
            }
            let inv = 1.0 / a[col * w + col];
            for k in 0..w {
                a[col * w + k] *= inv;
            }
            let pivot_row: Vec<f64> = a[col * w..(col + 1) * w].to_vec();
            for r in (0..m).filter(|&r| r != col) {
                let f = a[r * w + col];
                if f != 0.0 {
                    for k in 0..w {
                        a[r * w + k] -= f * pivot_row[k];
                    }
                }
            }
        }
        // B^{-1}[k][row] sits at a[k * w + m + row]; store column-major.
        for k in 0..m {
            for row in 0..m {
                basis.binv[row * m + k] = a[k * w + m + row];
            }
        }
        self.recompute_values(basis, rhs);
        Ok(())
    }

    fn recompute_values(&self, basis: &mut Basis, rhs: &[f64]) {
        let m = self.nrows;
        basis.x_b.iter_mut().for_each(|x| *x = 0.0);
        for (row, &b) in rhs.iter().enumerate() {
            if b != 0.0 {
                for (x, &v) in basis.x_b.iter_mut().zip(&basis.binv[row * m..(row + 1) * m]) {
                    *x += v * b;
                }
            }
        }
        for x in basis.x_b.iter_mut() {
            if x.abs() < 1e-13 {
                *x = 0.0;
            }
        }
    }

    fn residual(&self, basis: &Basis, rhs: &[f64]) -> f64 {
        let mut r = rhs.to_vec();
        for (k, &j) in basis.basic.iter().enumerate() {
            for (row, v) in self.column_entries(j) {
                r[row] -= v * basis.x_b[k];
            }
        }
        r.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Minimizes `cost^T x` starting from `start`, which must be primal
    /// feasible. `cost` should be scaled to unit maximum magnitude; the
    /// tolerances are absolute.
    ///
    /// The LP is highly degenerate, so the primal phase runs on a copy whose
    /// right-hand side lifts every structural basic value of `start` by a
    /// small fixed amount. The optimal basis found there is dual feasible for
    /// the true problem; dual simplex pivots then restore primal
    /// feasibility, and a final primal pass confirms optimality.
    pub fn solve(&self, start: &Basis, cost: &[f64], max_pivots: usize) -> Result<(Solution, Basis)> {
        assert_eq!(cost.len(), self.ncols());
        let n = self.ncols();
        let mut basis = start.clone();
        let mut stats = SolverStats::default();
        let mut rhs_p = self.rhs.clone();
        for r in 0..self.nrows {
            let j = basis.basic[r];
            if j < n {
                let lift = PERTURBATION * (1.0 + ((r as u64 * 2_654_435_761) % 1024) as f64 / 1024.0);
                basis.x_b[r] += lift;
                for (row, v) in self.column_entries(j) {
                    rhs_p[row] += v * lift;
                }
            }
        }
        self.primal(&mut basis, cost, &rhs_p, max_pivots, &mut stats)?;
        self.recompute_values(&mut basis, &self.rhs);
        self.dual_cleanup(&mut basis, cost, max_pivots, &mut stats)?;
        self.primal(&mut basis, cost, &self.rhs, max_pivots, &mut stats)?;

        let mut x = vec![0.0; n];
        for (k, &j) in basis.basic.iter().enumerate() {
            if j < n {
                x[j] = basis.x_b[k];
            }
        }
        Ok((Solution { x, stats }, basis))
    }

    fn primal(
        &self,
        basis: &mut Basis,
        cost: &[f64],
        rhs: &[f64],
        max_pivots: usize,
        stats: &mut SolverStats,
    ) -> Result<()> {
        let m = self.nrows;
        let n = self.ncols();
        let mut is_basic = vec![false; n];
        for &j in &basis.basic {
            if j < n {
                is_basic[j] = true;
            }
        }
        let mut y = vec![0.0; m];
        let mut d = vec![0.0; n];
        let mut alpha = vec![0.0; m];
        let mut rho = vec![0.0; m];
        let mut nz = Vec::with_capacity(m);
        let mut degenerate_run = 0usize;
        let mut since_refactor = 0usize;
        let mut weights = vec![1.0f64; n];
        self.duals(basis, cost, &mut y);

        loop {
            for j in 0..n {
                d[j] = if is_basic[j] { 0.0 } else { cost[j] - self.cols.column(j).map(|(r, v)| y[r] * v).sum::<f64>() };
            }
            let bland = degenerate_run >= DEGENERATE_RUN;
            let entering = if bland {
                (0..n).find(|&j| d[j] < -OPT_TOL)
            } else {
                (0..n)
                    .filter(|&j| d[j] < -OPT_TOL)
                    .max_by(|&a, &b| (d[a] * d[a] / weights[a]).total_cmp(&(d[b] * d[b] / weights[b])))
            };
            let Some(q) = entering else {
                // Confirm optimality against freshly computed duals.
                let mut fresh = vec![0.0; m];
                self.duals(basis, cost, &mut fresh);
                let drift = fresh.iter().zip(&y).fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
                if drift > 1e-10 {
                    y = fresh;
                    continue;
                }
                if self.residual(basis, rhs) > 1e-9 {
                    self.refactor(basis, rhs)?;
                    stats.refactorizations += 1;
                    self.duals(basis, cost, &mut y);
                    continue;
                }
                return Ok(());
            };
            if stats.pivots >= max_pivots {
                return Err(Error::Solver(format!("pivot cap {max_pivots} exceeded")));
            }

            self.ftran(basis, q, &mut alpha);
            nz.clear();
            nz.extend((0..m).filter(|&i| alpha[i].abs() > 1e-14));

            // Ratio test; basic artificials are fixed at zero and block any
            // nonzero pivot entry.
            let mut leave: Option<(usize, f64)> = None;
            for &r in &nz {
                let a = alpha[r];
                let ratio = if basis.basic[r] >= n {
                    if a.abs() <= PIVOT_TOL {
                        continue;
                    }
                    0.0
                } else {
                    if a <= PIVOT_TOL {
                        continue;
                    }
                    (basis.x_b[r] / a).max(0.0)
                };
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((br, bt)) => {
                        if ratio < bt - RATIO_TIE {
                            Some((r, ratio))
                        } else if ratio <= bt + RATIO_TIE {
                            let better = if bland {
                                basis.basic[r] < basis.basic[br]
                            } else {
                                alpha[r].abs() > alpha[br].abs()
                            };
                            if better { Some((r, ratio.min(bt))) } else { Some((br, bt.min(ratio))) }
                        } else {
                            Some((br, bt))
                        }
                    }
                };
            }
            let Some((p, theta)) = leave else {
                return Err(Error::Solver("unbounded direction on a bounded polytope".into()));
            };

            for (c, v) in rho.iter_mut().enumerate() {
                *v = basis.binv[c * m + p];
            }
            let dual_step = d[q] / alpha[p];
            for (yc, rc) in y.iter_mut().zip(&rho) {
                *yc += dual_step * rc;
            }
            // Devex reference weights from the pivot row.
            let wq = weights[q];
            let ap = alpha[p];
            for j in (0..n).filter(|&j| !is_basic[j] && j != q) {
                let a: f64 = self.cols.column(j).map(|(r, v)| rho[r] * v).sum();
                if a != 0.0 {
                    let ratio = a / ap;
                    weights[j] = weights[j].max(ratio * ratio * wq);
                }
            }
            nz.retain(|&i| alpha[i] != 0.0);
            pivot(basis, m, p, &alpha, &nz, theta);
            let old = basis.basic[p];
            if old < n {
                is_basic[old] = false;
                weights[old] = (wq / (ap * ap)).max(1.0);
            }
            basis.basic[p] = q;
            is_basic[q] = true;

            stats.pivots += 1;
            if bland {
                stats.bland_pivots += 1;
            }
            if theta <= 1e-12 {
                stats.degenerate_pivots += 1;
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            since_refactor += 1;
            if since_refactor >= REFACTOR_EVERY {
                self.refactor(basis, rhs)?;
                stats.refactorizations += 1;
                self.duals(basis, cost, &mut y);
                since_refactor = 0;
            }
        }
    }

    /// Dual simplex pivots from a dual-feasible basis until every basic
    /// value is nonnegative.
    fn dual_cleanup(&self, basis: &mut Basis, cost: &[f64], max_pivots: usize, stats: &mut SolverStats) -> Result<()> {
        let m = self.nrows;
        let n = self.ncols();
        let mut is_basic = vec![false; n];
        for &j in &basis.basic {
            if j < n {
                is_basic[j] = true;
            }
        }
        let mut y = vec![0.0; m];
        let mut rho = vec![0.0; m];
        let mut alpha = vec![0.0; m];
        loop {
            let Some(p) = (0..m)
                .filter(|&r| basis.x_b[r] < -FEAS_TOL)
                .min_by(|&a, &b| basis.x_b[a].total_cmp(&basis.x_b[b]))
            else {
                return Ok(());
            };
            if stats.pivots >= max_pivots {
                return Err(Error::Solver(format!("pivot cap {max_pivots} exceeded")));
            }
            self.duals(basis, cost, &mut y);
            for (c, v) in rho.iter_mut().enumerate() {
                *v = basis.binv[c * m + p];
            }
            let mut best: Option<(usize, f64, f64)> = None;
            for j in (0..n).filter(|&j| !is_basic[j]) {
                let a: f64 = self.cols.column(j).map(|(r, v)| rho[r] * v).sum();
                if a >= -PIVOT_TOL {
                    continue;
                }
                let dj = (cost[j] - self.cols.column(j).map(|(r, v)| y[r] * v).sum::<f64>()).max(0.0);
                let ratio = dj / -a;
                let better = match best {
                    None => true,
                    Some((_, br, ba)) => ratio < br - RATIO_TIE || (ratio <= br + RATIO_TIE && a.abs() > ba.abs()),
                };
                if better {
                    best = Some((j, ratio, a));
                }
            }
            let Some((q, _, _)) = best else {
                return Err(Error::Solver("primal infeasible after perturbation removal".into()));
            };
            self.ftran(basis, q, &mut alpha);
            let theta = basis.x_b[p] / alpha[p];
            let nz: Vec<usize> = (0..m).filter(|&i| alpha[i] != 0.0).collect();
            pivot(basis, m, p, &alpha, &nz, theta);
            let old = basis.basic[p];
            if old < n {
                is_basic[old] = false;
            }
            basis.basic[p] = q;
            is_basic[q] = true;
            stats.pivots += 1;
            stats.dual_pivots += 1;
        }
    }
}

/// Product-form update of the inverse and basic values for a pivot on row
/// `p` with entering column image `alpha` (nonzero rows `nz`).
fn pivot(basis: &mut Basis, m: usize, p: usize, alpha: &[f64], nz: &[usize], theta: f64) {
    let ap = alpha[p];
    for c in 0..m {
        let col = &mut basis.binv[c * m..(c + 1) * m];
        let piv = col[p];
        if piv == 0.0 {
            continue;
        }
        let scaled = piv / ap;
        for &r in nz {
            if r != p {
                col[r] -= alpha[r] * scaled;
            }
        }
        col[p] = scaled;
    }
    for &r in nz {
        if r != p {
            basis.x_b[r] -= theta * alpha[r];
            if basis.x_b[r].abs() < 1e-13 {
                basis.x_b[r] = 0.0;
            }
        }
    }
    basis.x_b[p] = theta;
}
