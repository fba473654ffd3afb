//! Linear-programming decoding over the fundamental polytope.
//!
//! For every check `α` with neighborhood `N(α)` the polytope carries one
//! weight `w_{α,T}` per even subset `T ⊆ N(α)`, with
//!
//! ```text
//! Σ_T w_{α,T} = 1,   f_i = Σ_{T ∋ i} w_{α,T}  (i ∈ N(α)),   w >= 0.
//! ```
//!
//! The bounds `0 <= f_i <= 1` and `w <= 1` are implied by these rows, so the
//! equality form needs no slack columns. The decoder minimizes `Σ γ_i f_i`.
//! The simplex core sees only the `w` columns, with each `f_i` substituted
//! by its expression at one check.

mod pseudo;
mod simplex;

pub use pseudo::{cost, median, w_awgn, w_bsc, PseudoCodeword};
pub use simplex::{SolveStatus, SolverStats};

use crate::channel::LlrVector;
use crate::code_model::TannerGraph;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use simplex::{Basis, SparseColumns, StandardLp};
use std::fmt::Write as _;

pub const DEFAULT_DEGREE_CAP: usize = 12;
/// Integrality tolerance.
pub const TAU_INT: f64 = 1e-6;
/// Feasibility tolerance for the re-check of returned points.
pub const TAU_FEAS: f64 = 1e-8;
const PIVOT_CAP: usize = 200_000;
/// Solver values this close to 0 or 1 are reported exactly.
const SNAP: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct LcLpInstance {
    n: usize,
    checks: Vec<Vec<usize>>,
    /// Even subsets of each check as bit masks over local neighbor positions.
    subsets: Vec<Vec<u32>>,
    home: Vec<Option<usize>>,
    /// First column of each check's `w` block; `w_offset[m]` is the total.
    w_offset: Vec<usize>,
    lp: StandardLp,
    start: Basis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpResult {
    pub pseudo_codeword: PseudoCodeword,
    pub objective: f64,
    pub integral: bool,
    pub solver_stats: SolverStats,
    pub status: SolveStatus,
    /// Local weights `w_{α,T}` in instance column order.
    #[serde(skip)]
    pub local_weights: Vec<f64>,
}

fn even_subsets(d: usize) -> Vec<u32> {
    (0u32..1 << d).filter(|t| t.count_ones() % 2 == 0).collect()
}

/// An optimal basis kept for warm-starting a later solve.
#[derive(Debug, Clone)]
pub struct WarmStart(Basis);

pub fn build_lclp(g: &TannerGraph) -> Result<LcLpInstance> {
    build_lclp_with_cap(g, DEFAULT_DEGREE_CAP)
}

pub fn build_lclp_with_cap(g: &TannerGraph, cap: usize) -> Result<LcLpInstance> {
    let n = g.n();
    let m = g.m();
    for c in 0..m {
        let d = g.check_degree(c);
        if d > cap {
            return Err(Error::DegreeCapExceeded { check: c, degree: d, cap });
        }
    }
    let checks: Vec<Vec<usize>> = (0..m).map(|c| g.check_neighbors(c).to_vec()).collect();
    let subsets: Vec<Vec<u32>> = checks.iter().map(|c| even_subsets(c.len())).collect();
    let home: Vec<Option<usize>> = (0..n).map(|v| g.var_neighbors(v).first().copied()).collect();

    // The solver works on the w variables alone: f_i is read off its home
    // check (its first neighbor), and every other check of i gets the row
    // Σ_{T ∋ i} w_{home,T} - Σ_{T ∋ i} w_{α,T} = 0. Rows: m sum rows, then
    // these coupling rows.
    let mut coupling: Vec<Vec<Option<usize>>> = checks.iter().map(|nb| vec![None; nb.len()]).collect();
    let mut other_rows: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut row = m;
    for (c, nb) in checks.iter().enumerate() {
        for (k, &v) in nb.iter().enumerate() {
            if home[v] != Some(c) {
                coupling[c][k] = Some(row);
                other_rows[v].push(row);
                row += 1;
            }
        }
    }
    let nrows = row;

    let mut cols = SparseColumns::new();
    let mut w_offset = Vec::with_capacity(m + 1);
    let mut basic = vec![0usize; nrows];
    let mut next = 0;
    for (c, masks) in subsets.iter().enumerate() {
        w_offset.push(next);
        for &t in masks {
            if t == 0 {
                basic[c] = next;
            }
            let mut entries = vec![(c, 1.0)];
            for k in (0..checks[c].len()).filter(|k| t >> k & 1 == 1) {
                match coupling[c][k] {
                    Some(r) => entries.push((r, -1.0)),
                    None => entries.extend(other_rows[checks[c][k]].iter().map(|&r| (r, 1.0))),
                }
            }
            entries.sort_unstable_by_key(|e| e.0);
            cols.push_column(entries);
            next += 1;
        }
    }
    w_offset.push(next);
    let ncols = next;
    for (r, b) in basic.iter_mut().enumerate().skip(m) {
        *b = ncols + r;
    }
    let mut rhs = vec![0.0; nrows];
    rhs[..m].iter_mut().for_each(|v| *v = 1.0);
    let lp = StandardLp::new(nrows, cols, rhs);
    let start = lp.identity_basis(basic);
    Ok(LcLpInstance { n, checks, subsets, home, w_offset, lp, start })
}

impl LcLpInstance {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Variable count of the polytope model, `n + Σ_α 2^{d_α - 1}`.
    pub fn num_variables(&self) -> usize {
        self.n + self.num_auxiliary()
    }

    pub fn num_auxiliary(&self) -> usize {
        self.lp.ncols()
    }

    /// Rows of the model: one sum row per check, one coupling row per edge.
    pub fn num_rows(&self) -> usize {
        self.checks.len() + self.checks.iter().map(Vec::len).sum::<usize>()
    }

    /// Rows of the reduced equality system handed to the simplex core.
    pub fn solver_rows(&self) -> usize {
        self.lp.nrows()
    }

    /// `f` implied by local weights `w`: each f_i is read off its home check;
    /// variables without checks get 0.
    fn f_from_w(&self, w: &[f64]) -> Vec<f64> {
        let mut f = vec![0.0; self.n];
        for (c, masks) in self.subsets.iter().enumerate() {
            let block = &w[self.w_offset[c]..self.w_offset[c + 1]];
            for (k, &v) in self.checks[c].iter().enumerate() {
                if self.home[v] == Some(c) {
                    f[v] = masks.iter().zip(block).filter(|(t, _)| *t >> k & 1 == 1).map(|(_, x)| x).sum();
                }
            }
        }
        f
    }

    /// Even subsets of check `c`, as sorted lists of variable indices.
    pub fn local_codewords(&self, c: usize) -> Vec<Vec<usize>> {
        self.subsets[c]
            .iter()
            .map(|&t| (0..self.checks[c].len()).filter(|k| t >> k & 1 == 1).map(|k| self.checks[c][k]).collect())
            .collect()
    }

    /// Largest violation of the polytope rows and sign constraints by
    /// `(f, w)`, where `w` is in instance column order.
    pub fn max_violation(&self, f: &[f64], w: &[f64]) -> Result<f64> {
        crate::error::expect_len(self.n, f.len())?;
        crate::error::expect_len(self.num_auxiliary(), w.len())?;
        let mut worst = 0.0f64;
        for &x in f.iter().chain(w) {
            worst = worst.max(-x).max(x - 1.0);
        }
        for (c, masks) in self.subsets.iter().enumerate() {
            let block = &w[self.w_offset[c]..self.w_offset[c + 1]];
            worst = worst.max((block.iter().sum::<f64>() - 1.0).abs());
            for (k, &v) in self.checks[c].iter().enumerate() {
                let s: f64 = masks.iter().zip(block).filter(|(t, _)| *t >> k & 1 == 1).map(|(_, x)| x).sum();
                worst = worst.max((f[v] - s).abs());
            }
        }
        Ok(worst)
    }

    /// Minimizes `Σ γ_i f_i` over the polytope, starting from the fixed
    /// initial vertex so that the result depends on `γ` alone.
    pub fn solve(&self, gamma: &LlrVector) -> Result<LpResult> {
        Ok(self.solve_warm(gamma, None)?.0)
    }

    /// Like [`solve`](Self::solve), but starts from the optimal basis of an
    /// earlier solve when given one. Any basis of this instance is primal
    /// feasible, so this only saves pivots; on a non-unique optimum the
    /// returned vertex may differ from a cold solve.
    pub fn solve_warm(&self, gamma: &LlrVector, warm: Option<&WarmStart>) -> Result<(LpResult, WarmStart)> {
        crate::error::expect_len(self.n, gamma.len())?;
        if gamma.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite LLR".into()));
        }
        let scale = gamma.values().iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let gamma = gamma.values();
        let mut c = vec![0.0; self.lp.ncols()];
        if scale > 0.0 {
            for (a, masks) in self.subsets.iter().enumerate() {
                for (k, &v) in self.checks[a].iter().enumerate() {
                    if self.home[v] == Some(a) {
                        for (j, &t) in masks.iter().enumerate() {
                            if t >> k & 1 == 1 {
                                c[self.w_offset[a] + j] += gamma[v] / scale;
                            }
                        }
                    }
                }
            }
        }
        let (sol, basis) = self.lp.solve(warm.map_or(&self.start, |w| &w.0), &c, PIVOT_CAP)?;
        let snap = |x: f64| {
            if x.abs() < SNAP {
                0.0
            } else if (x - 1.0).abs() < SNAP {
                1.0
            } else {
                x.clamp(0.0, 1.0)
            }
        };
        let w: Vec<f64> = sol.x.iter().map(|&x| snap(x)).collect();
        let mut f: Vec<f64> = self.f_from_w(&w).into_iter().map(snap).collect();
        // Variables outside every check are free in [0, 1].
        for (v, fv) in f.iter_mut().enumerate() {
            if self.home[v].is_none() && gamma[v] < 0.0 {
                *fv = 1.0;
            }
        }
        let violation = self.max_violation(&f, &w)?;
        if violation > TAU_FEAS {
            return Err(Error::Solver(format!("returned point violates the polytope by {violation:e}")));
        }
        let objective = f.iter().zip(gamma).map(|(a, b)| a * b).sum();
        let integral = f.iter().all(|&x| x.min(1.0 - x) <= TAU_INT);
        let result = LpResult {
            pseudo_codeword: PseudoCodeword::new_unchecked(f),
            objective,
            integral,
            solver_stats: sol.stats,
            status: SolveStatus::Optimal,
            local_weights: w,
        };
        Ok((result, WarmStart(basis)))
    }

    /// The LP in CPLEX LP text format, for cross-checking with external
    /// solvers. Variables are `f<i>` and `w<check>_<subset index>`.
    pub fn to_lp_text(&self, gamma: &LlrVector) -> Result<String> {
        crate::error::expect_len(self.n, gamma.len())?;
        let mut s = String::from("\\ LCLP\nMinimize\n obj:");
        for (i, g) in gamma.values().iter().enumerate() {
            let _ = write!(s, " {} {} f{i}", if *g < 0.0 { '-' } else { '+' }, g.abs());
        }
        s.push_str("\nSubject To\n");
        for (c, masks) in self.subsets.iter().enumerate() {
            let _ = write!(s, " s{c}:");
            for k in 0..masks.len() {
                let _ = write!(s, " + w{c}_{k}");
            }
            s.push_str(" = 1\n");
            for (pos, &v) in self.checks[c].iter().enumerate() {
                let _ = write!(s, " e{c}_{v}: f{v}");
                for (k, &t) in masks.iter().enumerate() {
                    if t >> pos & 1 == 1 {
                        let _ = write!(s, " - w{c}_{k}");
                    }
                }
                s.push_str(" = 0\n");
            }
        }
        s.push_str("Bounds\n");
        for i in 0..self.n {
            let _ = writeln!(s, " 0 <= f{i} <= 1");
        }
        for (c, masks) in self.subsets.iter().enumerate() {
            for k in 0..masks.len() {
                let _ = writeln!(s, " 0 <= w{c}_{k} <= 1");
            }
        }
        s.push_str("End\n");
        Ok(s)
    }
}

pub fn lp_solve(inst: &LcLpInstance, gamma: &LlrVector) -> Result<LpResult> {
    inst.solve(gamma)
}
