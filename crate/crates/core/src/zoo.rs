//! Random structured broadcast channels for property tests and sweeps.
//!
//! Dense random tensors almost always have a single connected component and
//! a trivial common channel. The generator here plants a component
//! structure first (a partition of each output alphabet), gives every input
//! positive mass on every component, and fills each component with a
//! full-support joint, so the derived common structure is non-degenerate.
//! With some probability a column is duplicated onto another input with a
//! different private conditional, which creates multi-member vertex classes
//! for the consensus-capacity inner problem.

use alloc::format;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::channel::{Alphabet, BroadcastChannel};
use crate::rng::{uniform_f64, uniform_usize};

/// Draws a random channel with alphabet sizes in `2..=max_alpha`.
pub fn random_channel(rng: &mut impl RngCore, max_alpha: usize) -> BroadcastChannel {
    let nx = 2 + uniform_usize(rng, max_alpha - 1);
    let ny = 2 + uniform_usize(rng, max_alpha - 1);
    let nz = 2 + uniform_usize(rng, max_alpha - 1);

    // Component plan: single component 20% of the time.
    let max_c = ny.min(nz).min(3);
    let c = if uniform_f64(rng) < 0.2 { 1 } else { 1 + uniform_usize(rng, max_c) };
    let y_groups = partition(rng, ny, c);
    let z_groups = partition(rng, nz, c);

    let mut w = alloc::vec![0.0; nx * ny * nz];
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(nx);
    for x in 0..nx {
        // Positive component weights.
        let mut weights: Vec<f64> = (0..c).map(|_| 0.05 + uniform_f64(rng)).collect();
        // Occasionally reuse an earlier input's weights: same polytope
        // point, different private behavior below.
        if x > 0 && uniform_f64(rng) < 0.3 {
            weights = columns[uniform_usize(rng, x)].clone();
        }
        let total: f64 = weights.iter().sum();
        for v in weights.iter_mut() {
            *v /= total;
        }
        for (v, &wv) in weights.iter().enumerate() {
            // Full-support joint on the component's output block.
            let cells = y_groups[v].len() * z_groups[v].len();
            let mut joint: Vec<f64> = (0..cells).map(|_| 0.05 + uniform_f64(rng)).collect();
            let jt: f64 = joint.iter().sum();
            for p in joint.iter_mut() {
                *p *= wv / jt;
            }
            let mut i = 0;
            for &y in &y_groups[v] {
                for &z in &z_groups[v] {
                    w[(x * ny + y) * nz + z] = joint[i];
                    i += 1;
                }
            }
        }
        columns.push(weights);
    }
    // Renormalize rows exactly (guards accumulated float error).
    for x in 0..nx {
        let sum: f64 = w[x * ny * nz..(x + 1) * ny * nz].iter().sum();
        for p in &mut w[x * ny * nz..(x + 1) * ny * nz] {
            *p /= sum;
        }
    }

    let xa = Alphabet::new((0..nx).map(|i| format!("x{i}"))).expect("distinct");
    let ya = Alphabet::new((0..ny).map(|i| format!("y{i}"))).expect("distinct");
    let za = Alphabet::new((0..nz).map(|i| format!("z{i}"))).expect("distinct");
    BroadcastChannel::new(xa, ya, za, w).expect("constructed rows are stochastic")
}

/// Random partition of `0..n` into exactly `parts` non-empty groups.
fn partition(rng: &mut impl RngCore, n: usize, parts: usize) -> Vec<Vec<usize>> {
    debug_assert!(parts <= n);
    let mut groups: Vec<Vec<usize>> = (0..parts).map(|i| alloc::vec![i]).collect();
    for item in parts..n {
        groups[uniform_usize(rng, parts)].push(item);
    }
    groups
}
