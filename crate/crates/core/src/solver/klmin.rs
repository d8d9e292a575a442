//! Constrained KL minimization by alternating I-projections.
//!
//! The general type decoder must decide whether some conditional
//! distribution `Q(x|u,y)` makes the induced joint `T(u,x,y) =
//! P(u,y) Q(x|u,y)` both close to a memoryless explanation,
//! `D(T || T_UX W_{Y|X})` small, and close to the codeword under the
//! decomposition-kernel distance, `sum T(u,x) cost(u,x) <= delta`.
//!
//! Writing `D(T || T_UX W) = min_S D(T || S W)` over auxiliary
//! distributions `S(u,x)` turns the problem into a joint minimization in
//! `(Q, S)` where each block update is exact: the `S` step is the marginal
//! of `T`, and the `Q` step is an exponentially tilted I-projection whose
//! tilt parameter is found by bisection on the linear constraint. Both steps
//! decrease a jointly convex objective, so the iteration converges to the
//! global minimum.

use alloc::vec::Vec;

use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverFailure;

impl core::fmt::Display for SolverFailure {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "KL feasibility solver produced a non-finite iterate")
    }
}

impl core::error::Error for SolverFailure {}

/// Minimum of `D(T || T_UX W_{Y|X})` in bits over `T(u,x,y) = P(u,y) Q(x|u,y)`
/// subject to `sum_{u,x} T_UX(u,x) cost[u][x] <= delta`.
///
/// * `p_uy[u * ny + y]`: the fixed (u, y) joint, typically a joint type.
/// * `w_rows[x * ny + y]`: the channel `W(y|x)`.
/// * `cost[u * nx + x]`: per-pair distance cost, in `[0, 1]`.
///
/// Returns `+inf` when no conditional distribution can satisfy the
/// constraint or explain an observed `(u, y)` pair at all.
pub fn constrained_channel_kl_min(
    p_uy: &[f64],
    nu: usize,
    ny: usize,
    w_rows: &[f64],
    nx: usize,
    cost: &[f64],
    delta: f64,
    max_iters: usize,
) -> Result<f64, SolverFailure> {
    debug_assert_eq!(p_uy.len(), nu * ny);
    debug_assert_eq!(w_rows.len(), nx * ny);
    debug_assert_eq!(cost.len(), nu * nx);

    // Active blocks: (u, y) pairs carrying mass.
    let blocks: Vec<(usize, usize, f64)> = (0..nu)
        .flat_map(|u| (0..ny).map(move |y| (u, y, 0.0)))
        .map(|(u, y, _)| (u, y, p_uy[u * ny + y]))
        .filter(|&(_, _, p)| p > 0.0)
        .collect();

    // Feasibility of the distance constraint given the channel supports: the
    // best reachable cost in each block is the minimum over x with W(y|x)>0.
    let mut min_cost = 0.0;
    for &(u, y, p) in &blocks {
        let mut m = f64::INFINITY;
        for x in 0..nx {
            if w_rows[x * ny + y] > 0.0 {
                m = m.min(cost[u * nx + x]);
            }
        }
        if m.is_infinite() {
            // No input explains this output symbol at all.
            return Ok(f64::INFINITY);
        }
        min_cost += p * m;
    }
    if min_cost > delta + 1e-12 {
        return Ok(f64::INFINITY);
    }

    // Q[b][x] per block; start proportional to the channel likelihood.
    let mut q: Vec<Vec<f64>> = blocks
        .iter()
        .map(|&(_, y, _)| {
            let mut row: Vec<f64> = (0..nx).map(|x| w_rows[x * ny + y]).collect();
            let sum: f64 = row.iter().sum();
            for v in row.iter_mut() {
                *v /= sum;
            }
            row
        })
        .collect();

    let marginal = |q: &[Vec<f64>]| -> Vec<f64> {
        let mut s = alloc::vec![0.0; nu * nx];
        for (b, &(u, _, p)) in blocks.iter().enumerate() {
            for x in 0..nx {
                s[u * nx + x] += p * q[b][x];
            }
        }
        s
    };

    let objective = |q: &[Vec<f64>]| -> f64 {
        let s = marginal(q);
        let mut d = 0.0;
        for (b, &(u, y, p)) in blocks.iter().enumerate() {
            for x in 0..nx {
                let t = p * q[b][x];
                d += math::xlog2_ratio(t, s[u * nx + x] * w_rows[x * ny + y]);
            }
        }
        d
    };

    let constraint_value = |q: &[Vec<f64>]| -> f64 {
        let mut v = 0.0;
        for (b, &(u, _, p)) in blocks.iter().enumerate() {
            for x in 0..nx {
                v += p * q[b][x] * cost[u * nx + x];
            }
        }
        v
    };

    // Tilted projection: Q(x|b) proportional to S(u,x) W(y|x) e^{-lambda c}.
    let project = |s: &[f64], lambda: f64, q: &mut [Vec<f64>]| {
        for (b, &(u, y, _)) in blocks.iter().enumerate() {
            let mut sum = 0.0;
            for x in 0..nx {
                let base = s[u * nx + x] * w_rows[x * ny + y];
                let v = if base > 0.0 {
                    base * math::exp(-lambda * cost[u * nx + x])
                } else {
                    0.0
                };
                q[b][x] = v;
                sum += v;
            }
            if sum > 0.0 {
                for v in q[b].iter_mut() {
                    *v /= sum;
                }
            } else {
                // The support died out numerically; fall back to the raw
                // channel likelihood restricted to reachable costs.
                let mut fallback_sum = 0.0;
                for x in 0..nx {
                    let v = w_rows[x * ny + y];
                    q[b][x] = v;
                    fallback_sum += v;
                }
                for v in q[b].iter_mut() {
                    *v /= fallback_sum;
                }
            }
        }
    };

    let mut prev = objective(&q);
    if !prev.is_finite() && prev.is_nan() {
        return Err(SolverFailure);
    }
    for _ in 0..max_iters {
        let s = marginal(&q);
        // Unconstrained projection first.
        project(&s, 0.0, &mut q);
        if constraint_value(&q) > delta + 1e-12 {
            // Find the tilt meeting the constraint by doubling + bisection.
            let mut hi = 1.0;
            for _ in 0..80 {
                project(&s, hi, &mut q);
                if constraint_value(&q) <= delta {
                    break;
                }
                hi *= 2.0;
            }
            let mut lo = 0.0;
            for _ in 0..70 {
                let mid = 0.5 * (lo + hi);
                project(&s, mid, &mut q);
                if constraint_value(&q) <= delta {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            project(&s, hi, &mut q);
        }
        let obj = objective(&q);
        if obj.is_nan() {
            return Err(SolverFailure);
        }
        if prev - obj < 1e-12 && obj.is_finite() {
            return Ok(obj.max(0.0));
        }
        prev = obj;
    }
    Ok(prev.max(0.0))
}
