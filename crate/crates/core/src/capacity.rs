//! Capacity solvers: point-to-point (Blahut-Arimoto), common-message
//! (max-min mutual information), and the consensus capacity.
//!
//! The consensus capacity maximizes, over distributions on the effective
//! input alphabet, the worst mutual information either receiver is left
//! with after the sender adversarially smears each effective letter across
//! its own vertex class:
//!
//! ```text
//! max_{P_U} min_{P_{X|U} class-supported} min( I(U;Y), I(U;Z) )
//! ```
//!
//! The outer problem is concave, the inner convex; both are solved
//! iteratively with multi-start ascent/descent plus deterministic grid and
//! pairwise-exchange refinement at small dimension. All values are in bits.

use alloc::vec::Vec;
use core::fmt;

use crate::channel::{BroadcastChannel, PointToPointChannel, Receiver};
use crate::common::CommonStructure;
use crate::math;
use crate::solver::optim::{
    blahut_arimoto, simplex_grid_foreach, supergradient_ascent, AscentOptions,
};

/// Default solver tolerance, in bits.
pub const DEFAULT_TOL: f64 = 1e-4;

/// Convergence data attached to every capacity value.
#[derive(Debug, Clone, Default)]
pub struct Diagnostics {
    pub iterations: usize,
    /// Final duality-gap (point-to-point) or ascent-vs-grid gap.
    pub gap: f64,
    pub grid_checked: bool,
}

#[derive(Debug, Clone)]
pub struct CapacityResult {
    /// Capacity estimate in bits per channel use.
    pub value: f64,
    /// Maximizing input distribution (over X, or over the effective alphabet
    /// for the consensus capacity).
    pub argmax: Vec<f64>,
    /// Minimizing class-supported kernels for the consensus capacity, one
    /// row per effective letter (aligned with its class member list), for
    /// each receiver.
    pub inner_kernel_y: Option<Vec<Vec<f64>>>,
    pub inner_kernel_z: Option<Vec<Vec<f64>>>,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CapacityError {
    NonConvergence { ascent: f64, grid: f64 },
    OrderingViolation { c_p2p_common: f64, c_byz: f64, c_com_msg: f64 },
}

impl fmt::Display for CapacityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CapacityError::NonConvergence { ascent, grid } => write!(
                f,
                "ascent ({ascent}) and grid ({grid}) estimates disagree beyond tolerance"
            ),
            CapacityError::OrderingViolation { c_p2p_common, c_byz, c_com_msg } => write!(
                f,
                "capacity ordering violated: {c_p2p_common} <= {c_byz} <= {c_com_msg} fails"
            ),
        }
    }
}

impl core::error::Error for CapacityError {}

/// `I(X;Y)` in bits for an input distribution and a point-to-point channel,
/// with `0 log 0 = 0`.
pub fn mutual_information(input: &[f64], channel: &PointToPointChannel) -> f64 {
    let nx = channel.input().len();
    let ny = channel.output().len();
    assert_eq!(input.len(), nx);
    let mut out = alloc::vec![0.0; ny];
    for x in 0..nx {
        if input[x] == 0.0 {
            continue;
        }
        for y in 0..ny {
            out[y] += input[x] * channel.prob(x, y);
        }
    }
    let mut i = 0.0;
    for x in 0..nx {
        if input[x] == 0.0 {
            continue;
        }
        for y in 0..ny {
            i += input[x] * math::xlog2_ratio(channel.prob(x, y), out[y]);
        }
    }
    i
}

/// Point-to-point capacity via Blahut-Arimoto, bracketed to `tol` bits.
pub fn p2p_capacity(channel: &PointToPointChannel, tol: f64) -> CapacityResult {
    let res = blahut_arimoto(channel, tol, 200_000);
    CapacityResult {
        value: res.value,
        argmax: res.argmax,
        inner_kernel_y: None,
        inner_kernel_z: None,
        diagnostics: Diagnostics { iterations: res.iterations, gap: res.bracket, grid_checked: false },
    }
}

/// Deterministic pairwise-exchange refinement of a concave simplex maximum.
///
/// Repeatedly tries to move mass `delta` between coordinate pairs, halving
/// `delta` when no exchange improves the objective.
fn exchange_polish(
    p: &mut Vec<f64>,
    mut best: f64,
    eval: &mut impl FnMut(&[f64]) -> f64,
    mut delta: f64,
    min_delta: f64,
) -> f64 {
    let k = p.len();
    while delta > min_delta {
        let mut improved = false;
        for from in 0..k {
            if p[from] < delta {
                continue;
            }
            for to in 0..k {
                if to == from {
                    continue;
                }
                let mut cand = p.clone();
                cand[from] -= delta;
                cand[to] += delta;
                let val = eval(&cand);
                if val > best + 1e-15 {
                    best = val;
                    *p = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            delta *= 0.5;
        }
    }
    best
}

/// Shared driver: maximize a concave function of a simplex point with
/// multi-start supergradient ascent, an optional coarse grid, and exchange
/// polish. Returns the best point, its value, and the grid-ascent gap.
fn maximize_concave(
    dim: usize,
    grid_steps: Option<usize>,
    tol: f64,
    eval: &mut impl FnMut(&[f64]) -> (f64, Vec<f64>),
) -> Result<(Vec<f64>, f64, Diagnostics), CapacityError> {
    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    starts.push(alloc::vec![1.0 / dim as f64; dim]);
    for i in 0..dim {
        let mut v = alloc::vec![0.0; dim];
        v[i] = 1.0;
        starts.push(v);
    }
    let mut best_p = starts[0].clone();
    let mut ascent_best = f64::NEG_INFINITY;
    let mut iterations = 0;
    for start in &starts {
        let (p, val, evals) =
            supergradient_ascent(start, AscentOptions { iterations: 220, step: 0.5 }, &mut *eval);
        iterations += evals;
        if val > ascent_best {
            ascent_best = val;
            best_p = p;
        }
    }

    let mut grid_best = f64::NEG_INFINITY;
    let mut grid_p = best_p.clone();
    if let Some(steps) = grid_steps {
        simplex_grid_foreach(dim, steps, |p| {
            let (val, _) = eval(p);
            if val > grid_best {
                grid_best = val;
                grid_p = p.to_vec();
            }
        });
        if grid_best > ascent_best + 5.0 * tol {
            return Err(CapacityError::NonConvergence { ascent: ascent_best, grid: grid_best });
        }
    }

    let (mut p, mut best) = if grid_best > ascent_best {
        (grid_p, grid_best)
    } else {
        (best_p, ascent_best)
    };
    let mut value_eval = |q: &[f64]| eval(q).0;
    best = exchange_polish(&mut p, best, &mut value_eval, 0.02, tol * 1e-3);
    let gap = math::abs(best - ascent_best.max(grid_best));
    Ok((
        p,
        best,
        Diagnostics { iterations, gap, grid_checked: grid_steps.is_some() },
    ))
}

/// Common-message capacity `max_{P_X} min(I(X;Y), I(X;Z))`.
///
/// Projected supergradient ascent restarted from the uniform distribution
/// and every vertex, verified against a 0.01-resolution simplex grid when
/// `|X| <= 3`. Fails with `NonConvergence` if the grid beats the ascent by
/// more than `5 * tol`.
pub fn common_message_capacity(
    channel: &BroadcastChannel,
    tol: f64,
) -> Result<CapacityResult, CapacityError> {
    let wy = channel.marginal(Receiver::Y);
    let wz = channel.marginal(Receiver::Z);
    let nx = channel.x_alphabet().len();
    let mut eval = |p: &[f64]| {
        let iy = mutual_information(p, &wy);
        let iz = mutual_information(p, &wz);
        let active = if iy <= iz { &wy } else { &wz };
        (iy.min(iz), mi_input_gradient(p, active))
    };
    let grid = if nx <= 3 { Some(100) } else { None };
    let (p, value, diagnostics) = maximize_concave(nx, grid, tol, &mut eval)?;
    Ok(CapacityResult {
        value,
        argmax: p,
        inner_kernel_y: None,
        inner_kernel_z: None,
        diagnostics,
    })
}

/// Gradient of `I(input; channel)` with respect to the input distribution:
/// `D(W(.|x) || out)` (constant shifts are irrelevant on the simplex).
fn mi_input_gradient(input: &[f64], channel: &PointToPointChannel) -> Vec<f64> {
    let nx = channel.input().len();
    let ny = channel.output().len();
    let mut out = alloc::vec![0.0; ny];
    for x in 0..nx {
        for y in 0..ny {
            out[y] += input[x] * channel.prob(x, y);
        }
    }
    (0..nx)
        .map(|x| {
            (0..ny)
                .map(|y| math::xlog2_ratio(channel.prob(x, y), out[y]))
                .sum::<f64>()
                .min(1e3)
        })
        .collect()
}

/// The inner convex problem of the consensus capacity for one receiver:
/// minimize `I(U;side)` over kernels supported on the vertex classes.
struct InnerProblem<'a> {
    p_u: &'a [f64],
    classes: &'a [Vec<usize>],
    side: &'a PointToPointChannel,
}

impl InnerProblem<'_> {
    /// Composed rows `Q_u(y) = sum_j K[u][j] W(y | class[u][j])`.
    fn compose(&self, kernel: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let ny = self.side.output().len();
        self.classes
            .iter()
            .zip(kernel)
            .map(|(members, row)| {
                let mut q = alloc::vec![0.0; ny];
                for (&x, &w) in members.iter().zip(row) {
                    if w > 0.0 {
                        for y in 0..ny {
                            q[y] += w * self.side.prob(x, y);
                        }
                    }
                }
                q
            })
            .collect()
    }

    fn objective(&self, kernel: &[Vec<f64>]) -> f64 {
        let q = self.compose(kernel);
        let ny = self.side.output().len();
        let mut out = alloc::vec![0.0; ny];
        for (u, qu) in q.iter().enumerate() {
            if self.p_u[u] == 0.0 {
                continue;
            }
            for y in 0..ny {
                out[y] += self.p_u[u] * qu[y];
            }
        }
        let mut i = 0.0;
        for (u, qu) in q.iter().enumerate() {
            if self.p_u[u] == 0.0 {
                continue;
            }
            for y in 0..ny {
                i += self.p_u[u] * math::xlog2_ratio(qu[y], out[y]);
            }
        }
        i
    }

    /// Gradient with respect to the kernel weights (clamped for stability).
    fn gradient(&self, kernel: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let q = self.compose(kernel);
        let ny = self.side.output().len();
        let mut out = alloc::vec![0.0; ny];
        for (u, qu) in q.iter().enumerate() {
            for y in 0..ny {
                out[y] += self.p_u[u] * qu[y];
            }
        }
        self.classes
            .iter()
            .enumerate()
            .map(|(u, members)| {
                members
                    .iter()
                    .map(|&x| {
                        let mut g = 0.0;
                        for y in 0..ny {
                            let w = self.side.prob(x, y);
                            if w > 0.0 {
                                let ratio = if q[u][y] > 0.0 && out[y] > 0.0 {
                                    math::log2(q[u][y] / out[y])
                                } else {
                                    -1e3
                                };
                                g += w * ratio;
                            }
                        }
                        (self.p_u[u] * g).clamp(-1e3, 1e3)
                    })
                    .collect()
            })
            .collect()
    }

    /// Exponentiated-gradient descent from a fixed start with backtracking.
    fn eg_descent(&self, mut kernel: Vec<Vec<f64>>, max_iters: usize) -> (f64, Vec<Vec<f64>>) {
        let mut best = self.objective(&kernel);
        let mut best_kernel = kernel.clone();
        let mut eta = 1.0;
        let mut stall = 0;
        for _ in 0..max_iters {
            let grad = self.gradient(&kernel);
            let mut improved = false;
            let mut try_eta = eta;
            for _ in 0..30 {
                let mut cand = kernel.clone();
                for (row, grow) in cand.iter_mut().zip(&grad) {
                    let mut sum = 0.0;
                    for (w, &g) in row.iter_mut().zip(grow) {
                        *w *= math::exp(-try_eta * g);
                        sum += *w;
                    }
                    if sum > 0.0 {
                        for w in row.iter_mut() {
                            *w /= sum;
                        }
                    }
                }
                let val = self.objective(&cand);
                if val < best - 1e-14 {
                    best = val;
                    kernel = cand.clone();
                    best_kernel = cand;
                    improved = true;
                    break;
                }
                try_eta *= 0.5;
            }
            if improved {
                eta = (try_eta * 2.0).min(8.0);
                stall = 0;
            } else {
                stall += 1;
                if stall >= 3 {
                    break;
                }
                eta *= 0.25;
            }
        }
        (best, best_kernel)
    }

    /// Minimizes the objective; the identity embedding is always among the
    /// starts, so the returned value never exceeds `I(U; side)` under the
    /// plain use of the representatives.
    fn solve(&self) -> (f64, Vec<Vec<f64>>) {
        let nontrivial = self.classes.iter().any(|c| c.len() > 1);
        // Representative point mass (class member 0 is the representative).
        let diag: Vec<Vec<f64>> = self
            .classes
            .iter()
            .map(|c| {
                let mut row = alloc::vec![0.0; c.len()];
                row[0] = 1.0;
                row
            })
            .collect();
        if !nontrivial {
            return (self.objective(&diag), diag);
        }
        let uniform: Vec<Vec<f64>> =
            self.classes.iter().map(|c| alloc::vec![1.0 / c.len() as f64; c.len()]).collect();
        let last: Vec<Vec<f64>> = self
            .classes
            .iter()
            .map(|c| {
                let mut row = alloc::vec![0.0; c.len()];
                row[c.len() - 1] = 1.0;
                row
            })
            .collect();

        let mut best = (self.objective(&diag), diag);
        for start in [uniform, last] {
            let (val, kernel) = self.eg_descent(start, 800);
            if val < best.0 {
                best = (val, kernel);
            }
        }

        // Grid cross-check at small total class size, then polish its argmin.
        let total: usize = self.classes.iter().map(|c| c.len()).sum();
        if total <= 6 {
            let (gval, gkern) = self.grid_min(20);
            let (pval, pkern) = self.eg_descent(gkern, 400);
            if gval < best.0 {
                best = (gval.min(pval), pkern);
            } else if pval < best.0 {
                best = (pval, pkern);
            }
        }
        best
    }

    /// Exhaustive product-grid minimization at the given resolution.
    fn grid_min(&self, steps: usize) -> (f64, Vec<Vec<f64>>) {
        // Pre-enumerate each class's simplex grid, then walk the product.
        let per_class: Vec<Vec<Vec<f64>>> = self
            .classes
            .iter()
            .map(|c| {
                let mut points = Vec::new();
                simplex_grid_foreach(c.len(), steps, |p| points.push(p.to_vec()));
                points
            })
            .collect();
        let mut best_val = f64::INFINITY;
        let mut best_kernel: Vec<Vec<f64>> =
            per_class.iter().map(|pts| pts[0].clone()).collect();
        let mut choice = alloc::vec![0usize; per_class.len()];
        loop {
            let kernel: Vec<Vec<f64>> = choice
                .iter()
                .enumerate()
                .map(|(u, &i)| per_class[u][i].clone())
                .collect();
            let val = self.objective(&kernel);
            if val < best_val {
                best_val = val;
                best_kernel = kernel;
            }
            // Odometer increment over the product of grids.
            let mut axis = 0;
            loop {
                if axis == per_class.len() {
                    return (best_val, best_kernel);
                }
                choice[axis] += 1;
                if choice[axis] < per_class[axis].len() {
                    break;
                }
                choice[axis] = 0;
                axis += 1;
            }
        }
    }
}

/// Consensus capacity of a broadcast channel, given its common structure.
///
/// Returns zero immediately when the effective alphabet is a singleton.
pub fn consensus_capacity(
    channel: &BroadcastChannel,
    common: &CommonStructure,
    tol: f64,
) -> Result<CapacityResult, CapacityError> {
    let classes = common.classes();
    let k = classes.len();
    if k <= 1 {
        return Ok(CapacityResult {
            value: 0.0,
            argmax: alloc::vec![1.0; k.max(1)],
            inner_kernel_y: None,
            inner_kernel_z: None,
            diagnostics: Diagnostics::default(),
        });
    }
    let wy = channel.marginal(Receiver::Y);
    let wz = channel.marginal(Receiver::Z);
    let singleton = classes.iter().all(|c| c.len() == 1);

    let mut eval = |p: &[f64]| {
        let py = InnerProblem { p_u: p, classes, side: &wy };
        let pz = InnerProblem { p_u: p, classes, side: &wz };
        let (vy, ky) = py.solve();
        let (vz, kz) = pz.solve();
        // Supergradient of the active side at its minimizing kernel.
        let (active, kernel) = if vy <= vz { (&py, &ky) } else { (&pz, &kz) };
        let q = active.compose(kernel);
        let ny = active.side.output().len();
        let mut out = alloc::vec![0.0; ny];
        for (u, qu) in q.iter().enumerate() {
            for y in 0..ny {
                out[y] += p[u] * qu[y];
            }
        }
        let grad: Vec<f64> = q
            .iter()
            .map(|qu| {
                (0..ny)
                    .map(|y| math::xlog2_ratio(qu[y], out[y]))
                    .sum::<f64>()
                    .min(1e3)
            })
            .collect();
        (vy.min(vz), grad)
    };

    let grid = match (singleton, k) {
        (true, 2) => Some(400),
        (true, 3) => Some(100),
        (true, 4) => Some(40),
        (false, 2) => Some(50),
        (false, 3) => Some(20),
        _ => None,
    };
    let (p, value, diagnostics) = maximize_concave(k, grid, tol, &mut eval)?;

    let py = InnerProblem { p_u: &p, classes, side: &wy };
    let pz = InnerProblem { p_u: &p, classes, side: &wz };
    let (_, ky) = py.solve();
    let (_, kz) = pz.solve();
    Ok(CapacityResult {
        value,
        argmax: p,
        inner_kernel_y: Some(ky),
        inner_kernel_z: Some(kz),
        diagnostics,
    })
}

/// The three capacities of a channel with the ordering sanity check
/// `C_p2p(common) <= C_Byz <= C_com-msg` enforced within `2 * tol`.
#[derive(Debug, Clone)]
pub struct CapacityReport {
    pub c_p2p_common: CapacityResult,
    pub c_byz: CapacityResult,
    pub c_com_msg: CapacityResult,
}

pub fn capacity_report(
    channel: &BroadcastChannel,
    common: &CommonStructure,
    tol: f64,
) -> Result<CapacityReport, CapacityError> {
    let c_p2p_common = p2p_capacity(common.common_channel(), tol);
    let c_byz = consensus_capacity(channel, common, tol)?;
    let c_com_msg = common_message_capacity(channel, tol)?;
    let slack = 2.0 * tol;
    if c_p2p_common.value > c_byz.value + slack || c_byz.value > c_com_msg.value + slack {
        return Err(CapacityError::OrderingViolation {
            c_p2p_common: c_p2p_common.value,
            c_byz: c_byz.value,
            c_com_msg: c_com_msg.value,
        });
    }
    Ok(CapacityReport { c_p2p_common, c_byz, c_com_msg })
}
