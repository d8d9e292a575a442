//! Generic optimization pieces used by the capacity solvers: Blahut-Arimoto
//! with its capacity bracket, projected supergradient ascent over the
//! simplex, and simplex grid enumeration for small-dimension cross-checks.

use alloc::vec::Vec;

use crate::channel::PointToPointChannel;
use crate::math;

/// Euclidean projection onto the probability simplex.
pub fn project_simplex(v: &mut [f64]) {
    let n = v.len();
    let mut sorted: Vec<f64> = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    let mut acc = 0.0;
    let mut theta = 0.0;
    let mut k = 0;
    for (i, &s) in sorted.iter().enumerate() {
        acc += s;
        let t = (acc - 1.0) / (i + 1) as f64;
        if s - t > 0.0 {
            theta = t;
            k = i + 1;
        }
    }
    debug_assert!(k > 0);
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
    let sum: f64 = v.iter().sum();
    for x in v.iter_mut() {
        *x /= sum;
    }
    let _ = n;
}

/// Calls `f` on every probability vector of dimension `k` whose entries are
/// multiples of `1/steps`.
pub fn simplex_grid_foreach(k: usize, steps: usize, mut f: impl FnMut(&[f64])) {
    let mut counts = alloc::vec![0usize; k];
    let mut point = alloc::vec![0.0; k];
    fn recurse(
        counts: &mut [usize],
        point: &mut [f64],
        axis: usize,
        remaining: usize,
        steps: usize,
        f: &mut impl FnMut(&[f64]),
    ) {
        if axis + 1 == counts.len() {
            counts[axis] = remaining;
            for (p, &c) in point.iter_mut().zip(counts.iter()) {
                *p = c as f64 / steps as f64;
            }
            f(point);
            return;
        }
        for c in 0..=remaining {
            counts[axis] = c;
            recurse(counts, point, axis + 1, remaining - c, steps, f);
        }
    }
    recurse(&mut counts, &mut point, 0, steps, steps, &mut f);
}

/// Result of a Blahut-Arimoto run.
#[derive(Debug, Clone)]
pub struct BaResult {
    /// Achieved mutual information at the final input distribution (a lower
    /// bound on capacity within `bracket` of it).
    pub value: f64,
    pub argmax: Vec<f64>,
    pub iterations: usize,
    /// Final `max_x D_x - I` duality gap.
    pub bracket: f64,
}

/// Blahut-Arimoto capacity iteration, stopping once the capacity bracket
/// `max_x D(W(.|x) || out) - I(r)` falls below `tol` (in bits).
pub fn blahut_arimoto(channel: &PointToPointChannel, tol: f64, max_iters: usize) -> BaResult {
    let nx = channel.input().len();
    let ny = channel.output().len();
    let mut r = alloc::vec![1.0 / nx as f64; nx];
    let mut d = alloc::vec![0.0; nx];
    let mut iterations = 0;
    let mut bracket = f64::INFINITY;
    let mut value = 0.0;
    for it in 0..max_iters {
        iterations = it + 1;
        let mut out = alloc::vec![0.0; ny];
        for x in 0..nx {
            if r[x] == 0.0 {
                continue;
            }
            for y in 0..ny {
                out[y] += r[x] * channel.prob(x, y);
            }
        }
        for x in 0..nx {
            d[x] = (0..ny)
                .map(|y| math::xlog2_ratio(channel.prob(x, y), out[y]))
                .sum();
        }
        let upper = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lower: f64 = r.iter().zip(&d).map(|(&ri, &di)| ri * di).sum();
        value = lower;
        bracket = upper - lower;
        if bracket < tol {
            break;
        }
        // Multiplicative update r(x) <- r(x) 2^{D_x} / Z.
        let mut z = 0.0;
        for x in 0..nx {
            r[x] *= math::exp2(d[x] - upper); // shift by upper for stability
            z += r[x];
        }
        for x in 0..nx {
            r[x] /= z;
        }
    }
    BaResult { value, argmax: r, iterations, bracket }
}

/// Options for the projected supergradient ascent.
#[derive(Debug, Clone, Copy)]
pub struct AscentOptions {
    pub iterations: usize,
    pub step: f64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        AscentOptions { iterations: 500, step: 0.5 }
    }
}

/// Maximizes a concave function over the probability simplex by projected
/// supergradient ascent with diminishing steps, keeping the best iterate.
///
/// `eval` returns the objective value and a supergradient at the query point.
pub fn supergradient_ascent(
    start: &[f64],
    opts: AscentOptions,
    mut eval: impl FnMut(&[f64]) -> (f64, Vec<f64>),
) -> (Vec<f64>, f64, usize) {
    let mut p = start.to_vec();
    let (mut best_val, mut g) = eval(&p);
    let mut best_p = p.clone();
    let mut evals = 1;
    for t in 1..=opts.iterations {
        let scale = g.iter().fold(0.0f64, |m, &v| m.max(math::abs(v))).max(1e-12);
        let step = opts.step / (scale * math::sqrt(t as f64));
        for (pi, gi) in p.iter_mut().zip(&g) {
            *pi += step * gi;
        }
        project_simplex(&mut p);
        let (val, grad) = eval(&p);
        evals += 1;
        if val > best_val {
            best_val = val;
            best_p.copy_from_slice(&p);
        }
        g = grad;
    }
    (best_p, best_val, evals)
}
