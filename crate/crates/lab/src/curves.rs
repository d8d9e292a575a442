//! Multi-point experiment harnesses: error-vs-blocklength curves for the
//! shared-randomness scheme, honest-error trends for the erasure scheme at
//! true rate, and capacity parameter sweeps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use consensus_lab_core::adversary::AttackPlan;
use consensus_lab_core::capacity::{capacity_report, DEFAULT_TOL};
use consensus_lab_core::channel::{make_bec_pair, make_two_step_bec};
use consensus_lab_core::coding::{gv_codebook_with_count, message_count, MAX_EXPLICIT_MESSAGES};
use consensus_lab_core::common::build_common_structure;
use consensus_lab_core::decoding::{
    choose_ell, DecoderConfig, ErasureSymbols, LinearErasureDecoder, SharedRandDecoder,
};
use consensus_lab_core::gf2::{BitVec, LinearCode};
use consensus_lab_core::rng::{root_rng, trial_rng};
use consensus_lab_core::sim::{estimate95, Estimate};

use crate::driver::{
    par_attack_counts, par_honest_failures_mixed, par_linear_attack_counts,
    par_linear_honest_failures,
};
use crate::{families::Family, LabError};

/// One block length of the shared-randomness error curve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SharedRandPoint {
    pub n: usize,
    pub k: usize,
    pub realized_rate: f64,
    pub ell: u32,
    pub distance: usize,
    pub lambda: (f64, f64),
    /// Worst disagreement over the attack sweep: (flips, estimate, radius).
    pub worst_flips: usize,
    pub eta_worst: (f64, f64),
    pub p_e: f64,
}

/// Error curve of the receiver-shared-randomness scheme on the independent
/// erasure pair: a minimum-distance codebook (distance strictly above
/// `n (2q + delta)`), the threshold decoder with window exponent from
/// `choose_ell`, honest transmissions, and a sweep of near-codeword inputs
/// whose distances straddle the random threshold.
///
/// `max_messages` caps the explicit codebook size; the realized rate is
/// reported per point.
pub fn shared_rand_error_curve(
    q: f64,
    rate: f64,
    delta: f64,
    n_grid: &[usize],
    trials: u64,
    seed: u64,
    max_messages: usize,
) -> Result<Vec<SharedRandPoint>, LabError> {
    let channel = make_bec_pair(q)?;
    let symbols = ErasureSymbols::bec_pair();
    let mut points = Vec::with_capacity(n_grid.len());
    for (grid_idx, &n) in n_grid.iter().enumerate() {
        let k = message_count(n, rate)
            .unwrap_or(MAX_EXPLICIT_MESSAGES)
            .min(max_messages);
        // Pairwise distance strictly above n(2q + delta).
        let distance = (n as f64 * (2.0 * q + delta)).floor() as usize + 1;
        // Feasibility pre-check: the realized rate must stay under what the
        // packing bound allows at this distance, else greedy construction
        // would only exhaust its retry budget.
        let realized_rate = (k as f64).log2() / n as f64;
        let gv_bound = 1.0 - consensus_lab_core::math::h2((distance as f64 / n as f64).min(0.5));
        if realized_rate >= gv_bound {
            return Err(consensus_lab_core::coding::CodingError::RateInfeasible {
                rate: realized_rate,
                bound: gv_bound,
            }
            .into());
        }
        let ell = choose_ell(n, delta)?;
        let mut book_rng = root_rng(seed ^ (0x5eed_0000 + grid_idx as u64));
        let codebook = gv_codebook_with_count(n, k, distance, 50, &mut book_rng)?;
        let decoder = SharedRandDecoder::new(&codebook, symbols, ell);

        let failures = par_honest_failures_mixed(&channel, &codebook, &decoder, trials, seed);
        let lambda = estimate95(failures, trials);

        // Sweep of case-(iii) distances: all counts that can straddle the
        // threshold window, plus the largest distance still inside the case.
        let t_max = (n as f64 * (q + delta / 2.0)).floor() as usize;
        let straddle_top =
            (((1u64 << (ell + 1)) as f64) / (1.0 - q)).ceil() as usize;
        let mut sweep: Vec<usize> = (1..=straddle_top.min(t_max)).collect();
        if !sweep.contains(&t_max) && t_max >= 1 {
            sweep.push(t_max);
        }
        let mut worst = (0usize, Estimate::exact(0.0), 0u64);
        for &flips in &sweep {
            let plan = AttackPlan::Boundary { codeword: codebook.word(0), flips };
            let counts = par_attack_counts(&channel, &plan, &decoder, trials, seed ^ 0xa77ac4);
            let est = estimate95(counts.strict, counts.trials);
            if est.value > worst.1.value {
                worst = (flips, est, counts.strict);
            }
        }
        points.push(SharedRandPoint {
            n,
            k,
            realized_rate: codebook.rate(),
            ell,
            distance,
            lambda: (lambda.value, lambda.radius),
            worst_flips: worst.0,
            eta_worst: (worst.1.value, worst.1.radius),
            p_e: lambda.value.max(worst.1.value),
        });
    }
    Ok(points)
}

/// One block length of the erasure-scheme trend.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErasureTrendPoint {
    pub n: usize,
    pub k: usize,
    pub min_distance_bound: usize,
    pub distance_verified_exhaustively: bool,
    pub lambda: (f64, f64),
    pub lambda_failures: u64,
    pub honest_trials: u64,
    pub eta_per_attack: Vec<(String, f64, f64)>,
    pub eta_max: f64,
    pub p_e: f64,
}

/// Honest-error trend and attack-menu robustness of the two-condition
/// erasure decoder at true rate `R` over the two-step channel, using random
/// binary linear codebooks (`2^{floor(nR)}` messages) and the affine-search
/// decoder.
///
/// Codebooks are drawn until the minimum distance clears `2 delta n`:
/// verified exhaustively for `k <= 24` message bits, by weight sampling
/// above that. `honest_trials` is given per block length because the honest
/// failure probability falls steeply with `n`: resolving the trend needs far
/// more trials at larger blocks.
pub fn erasure_scheme_trend(
    p: f64,
    q: f64,
    rate: f64,
    delta: f64,
    n_grid: &[usize],
    honest_trials: &[u64],
    attack_trials: u64,
    seed: u64,
) -> Result<Vec<ErasureTrendPoint>, LabError> {
    assert_eq!(n_grid.len(), honest_trials.len());
    let channel = make_two_step_bec(p, q)?;
    let common = build_common_structure(&channel);
    let kernel = common.find_mixing_kernel(None)?;
    let config = DecoderConfig::new(delta, 0.05)?;
    let mut points = Vec::with_capacity(n_grid.len());
    for (&n, &honest_trials) in n_grid.iter().zip(honest_trials) {
        let k = (n as f64 * rate + 1e-9).floor() as usize;
        let distance_bound = (2.0 * delta * n as f64 - 1e-9).ceil() as usize;
        let mut verified = false;
        let mut code = None;
        for attempt in 0..40u64 {
            let mut rng = trial_rng(seed ^ 0xc0de, (n as u64) << 8 | attempt);
            let cand = LinearCode::random(n, k, &mut rng);
            let ok = if k <= 24 {
                verified = true;
                cand.min_distance_exhaustive() >= distance_bound
            } else {
                verified = false;
                cand.min_distance_sampled(200_000, &mut rng) >= distance_bound
            };
            if ok {
                code = Some(cand);
                break;
            }
        }
        let code = code.ok_or(consensus_lab_core::coding::CodingError::ConstructionFailed {
            attempts: 40,
        })?;
        let decoder = LinearErasureDecoder::new(code, ErasureSymbols::two_step(), config);

        let failures = par_linear_honest_failures(&channel, &decoder, honest_trials, seed);
        let lambda = estimate95(failures, honest_trials);

        // Attack menu over two reference codewords.
        let mut msg_rng = trial_rng(seed ^ 0xbeef, n as u64);
        let msg_a = BitVec::random(k, &mut msg_rng);
        let msg_b = BitVec::random(k, &mut msg_rng);
        let word_a = decoder.code().encode(&msg_a).to_bits();
        let word_b = decoder.code().encode(&msg_b).to_bits();
        let boundary_flips =
            consensus_lab_core::adversary::boundary_flip_count(n, delta);
        let plans: Vec<AttackPlan<'_>> = vec![
            AttackPlan::Mixing { codeword: &word_a, kernel: &kernel },
            AttackPlan::Boundary { codeword: &word_a, flips: 1 },
            AttackPlan::Boundary { codeword: &word_a, flips: boundary_flips },
            AttackPlan::Hybrid { first: &word_a, second: &word_b, prefix: n / 4 },
            AttackPlan::Hybrid { first: &word_a, second: &word_b, prefix: n / 2 },
            AttackPlan::Hybrid { first: &word_a, second: &word_b, prefix: 3 * n / 4 },
        ];
        let mut eta_per_attack = Vec::with_capacity(plans.len());
        let mut eta_max: f64 = 0.0;
        for plan in &plans {
            let counts =
                par_linear_attack_counts(&channel, plan, &decoder, attack_trials, seed ^ 0xe7a);
            let est = estimate95(counts.strict, counts.trials);
            eta_max = eta_max.max(est.value);
            eta_per_attack.push((plan.label(), est.value, est.radius));
        }
        points.push(ErasureTrendPoint {
            n,
            k,
            min_distance_bound: distance_bound,
            distance_verified_exhaustively: verified,
            lambda: (lambda.value, lambda.radius),
            lambda_failures: failures,
            honest_trials,
            eta_per_attack,
            eta_max,
            p_e: lambda.value.max(eta_max),
        });
    }
    Ok(points)
}

/// One parameter value of a capacity sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub c_p2p_common: f64,
    pub c_byz: f64,
    pub c_com_msg: f64,
}

/// Evaluates the three capacities along a family parameter grid.
pub fn capacity_sweep(
    family: &Family,
    param: &str,
    start: f64,
    stop: f64,
    step: f64,
    tol: f64,
) -> Result<Vec<SweepRow>, LabError> {
    if step <= 0.0 || stop < start {
        return Err(LabError::Usage("sweep needs start <= stop and step > 0".into()));
    }
    let mut values = Vec::new();
    let mut v = start;
    while v <= stop + 1e-12 {
        values.push(v.min(stop));
        v += step;
    }
    let rows: Result<Vec<SweepRow>, LabError> = values
        .par_iter()
        .map(|&value| {
            let fam = substitute_param(family, param, value)?;
            let channel = fam.build()?;
            let common = build_common_structure(&channel);
            let report = capacity_report(&channel, &common, tol.max(DEFAULT_TOL))?;
            Ok(SweepRow {
                value,
                c_p2p_common: report.c_p2p_common.value,
                c_byz: report.c_byz.value,
                c_com_msg: report.c_com_msg.value,
            })
        })
        .collect();
    rows
}

fn substitute_param(family: &Family, param: &str, value: f64) -> Result<Family, LabError> {
    let fam = match (family, param) {
        (Family::TwoStepBec { q, .. }, "p") => Family::TwoStepBec { p: value, q: *q },
        (Family::TwoStepBec { p, .. }, "q") => Family::TwoStepBec { p: *p, q: value },
        (Family::BecPair { .. }, "q") => Family::BecPair { q: value },
        (Family::BscMix { .. }, "p") => Family::BscMix { p: value },
        _ => {
            return Err(LabError::Usage(format!(
                "family has no sweepable parameter {param:?}"
            )))
        }
    };
    Ok(fam)
}
