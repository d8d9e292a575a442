//! Dense two-phase simplex for small standard-form linear programs:
//! minimize `c·x` subject to `A x = b`, `x >= 0`.
//!
//! Problems in this crate have at most a few dozen variables, so a plain
//! tableau with Bland's pivoting rule (deterministic, cycle-free) is the
//! robust choice. Solutions are basic, so the returned optimum is the one
//! reached by Bland's fixed ordering, which keeps downstream certificates
//! reproducible.

use alloc::vec::Vec;

/// Pivot threshold below which a coefficient is treated as zero.
const PIVOT_TOL: f64 = 1e-11;
/// Reduced-cost threshold for optimality.
const COST_TOL: f64 = 1e-10;
/// Feasibility threshold on the phase-1 objective.
const FEAS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum LpError {
    Infeasible,
    Unbounded,
    BadShape,
}

impl core::fmt::Display for LpError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            LpError::Infeasible => write!(f, "linear program is infeasible"),
            LpError::Unbounded => write!(f, "linear program is unbounded"),
            LpError::BadShape => write!(f, "inconsistent LP dimensions"),
        }
    }
}

impl core::error::Error for LpError {}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

struct Tableau {
    /// `m x (width + 1)` rows; last column is the rhs.
    rows: Vec<Vec<f64>>,
    /// Objective row (reduced costs), length `width + 1`.
    cost: Vec<f64>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.rows[row][col];
        debug_assert!(piv.abs() > PIVOT_TOL);
        let inv = 1.0 / piv;
        for v in self.rows[row].iter_mut() {
            *v *= inv;
        }
        let pivot_row = self.rows[row].clone();
        for (r, other) in self.rows.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let factor = other[col];
            if factor != 0.0 {
                for (v, pv) in other.iter_mut().zip(&pivot_row) {
                    *v -= factor * pv;
                }
            }
        }
        let factor = self.cost[col];
        if factor != 0.0 {
            for (v, pv) in self.cost.iter_mut().zip(&pivot_row) {
                *v -= factor * pv;
            }
        }
        self.basis[row] = col;
    }

    /// Runs simplex iterations with Bland's rule until optimal or unbounded.
    fn optimize(&mut self) -> Result<(), LpError> {
        loop {
            // Entering: lowest-index column with negative reduced cost.
            let Some(col) = (0..self.width).find(|&j| self.cost[j] < -COST_TOL) else {
                return Ok(());
            };
            // Leaving: min ratio, ties broken by lowest basis index.
            let mut best: Option<(usize, f64)> = None;
            for r in 0..self.rows.len() {
                let a = self.rows[r][col];
                if a > PIVOT_TOL {
                    let ratio = self.rows[r][self.width] / a;
                    let better = match best {
                        None => true,
                        Some((br, bratio)) => {
                            ratio < bratio - PIVOT_TOL
                                || (ratio < bratio + PIVOT_TOL && self.basis[r] < self.basis[br])
                        }
                    };
                    if better {
                        best = Some((r, ratio));
                    }
                }
            }
            let Some((row, _)) = best else {
                return Err(LpError::Unbounded);
            };
            self.pivot(row, col);
        }
    }
}

/// Solves `min c·x : A x = b, x >= 0` where `a` holds the rows of `A`.
pub fn solve_standard_form(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<LpSolution, LpError> {
    let m = a.len();
    if b.len() != m {
        return Err(LpError::BadShape);
    }
    let n = c.len();
    if a.iter().any(|row| row.len() != n) {
        return Err(LpError::BadShape);
    }

    // Phase 1: artificial basis. Flip rows so rhs >= 0.
    let width = n + m;
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut row = alloc::vec![0.0; width + 1];
        for j in 0..n {
            row[j] = sign * a[i][j];
        }
        row[n + i] = 1.0;
        row[width] = sign * b[i];
        rows.push(row);
    }
    let basis: Vec<usize> = (n..n + m).collect();
    // Phase-1 cost: sum of artificials, expressed through the basis.
    let mut cost = alloc::vec![0.0; width + 1];
    for j in 0..width {
        if j >= n {
            continue;
        }
        cost[j] = -rows.iter().map(|r| r[j]).sum::<f64>();
    }
    cost[width] = -rows.iter().map(|r| r[width]).sum::<f64>();

    let mut t = Tableau { rows, cost, basis, width };
    t.optimize()?;
    let phase1 = -t.cost[t.width];
    if phase1 > FEAS_TOL {
        return Err(LpError::Infeasible);
    }

    // Drive remaining artificials out of the basis; drop redundant rows.
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= n {
            if let Some(col) = (0..n).find(|&j| t.rows[r][j].abs() > 1e-7) {
                t.pivot(r, col);
            } else {
                t.rows.remove(r);
                t.basis.remove(r);
                continue;
            }
        }
        r += 1;
    }

    // Phase 2: original costs over the structural columns only.
    for row in t.rows.iter_mut() {
        for j in n..width {
            row[j] = 0.0;
        }
    }
    let mut cost2 = alloc::vec![0.0; width + 1];
    cost2[..n].copy_from_slice(c);
    // Express the cost through the current basis.
    for (r, &bj) in t.basis.iter().enumerate() {
        let factor = cost2[bj];
        if factor != 0.0 {
            let row = t.rows[r].clone();
            for (v, rv) in cost2.iter_mut().zip(&row) {
                *v -= factor * rv;
            }
        }
    }
    t.cost = cost2;
    t.optimize()?;

    let mut x = alloc::vec![0.0; n];
    for (r, &bj) in t.basis.iter().enumerate() {
        if bj < n {
            x[bj] = t.rows[r][t.width].max(0.0);
        }
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(LpSolution { x, objective })
}

/// Best L1 approximation of `target` by a convex combination of `columns`.
///
/// Returns the mixture weights and the optimal L1 residual
/// `min_w || sum_j w_j col_j - target ||_1` over the probability simplex.
pub fn l1_mixture_fit(columns: &[Vec<f64>], target: &[f64]) -> (Vec<f64>, f64) {
    let k = columns.len();
    let d = target.len();
    assert!(k > 0);
    assert!(columns.iter().all(|c| c.len() == d));
    // Variables: w_1..w_k, then s+_1..s+_d, s-_1..s-_d.
    let n = k + 2 * d;
    let mut a = Vec::with_capacity(d + 1);
    let mut b = Vec::with_capacity(d + 1);
    for v in 0..d {
        let mut row = alloc::vec![0.0; n];
        for (j, col) in columns.iter().enumerate() {
            row[j] = col[v];
        }
        row[k + v] = 1.0;
        row[k + d + v] = -1.0;
        a.push(row);
        b.push(target[v]);
    }
    let mut row = alloc::vec![0.0; n];
    for j in 0..k {
        row[j] = 1.0;
    }
    a.push(row);
    b.push(1.0);
    let mut c = alloc::vec![0.0; n];
    for j in k..n {
        c[j] = 1.0;
    }
    let sol = solve_standard_form(&a, &b, &c)
        .expect("mixture-fit LP has a feasible point (any single column)");
    (sol.x[..k].to_vec(), sol.objective.max(0.0))
}
