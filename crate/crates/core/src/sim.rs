//! Error estimation: Monte Carlo trials, exact small-instance enumeration,
//! and the exhaustive minimum-error oracle.
//!
//! The quantities estimated are the honest failure probability per message,
//! `lambda_m = 1 - P(both decoders output m | f(m) sent)`, the disagreement
//! probability `eta_x = P(decoder outputs differ | x sent)` for adversarial
//! inputs, and their maximum `p_e = max(lambda, eta)`. A `(Bot, m)` outcome
//! pair counts as disagreement.
//!
//! Trials are keyed by `(seed, trial index)`, so aggregation is independent
//! of evaluation order and runs can be sharded across threads; within one
//! trial the draw order is fixed: attack word, then shared randomness, then
//! channel noise.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::adversary::AttackPlan;
use crate::channel::{BroadcastChannel, ChannelSampler};
use crate::coding::Codebook;
use crate::decoding::{ConsensusDecoder, DecodeOutcome, LinearErasureDecoder, LinearOutcome, Side};
use crate::gf2::BitVec;
use crate::math;
use crate::rng::trial_rng;

/// z-scores for the reported confidence radii.
pub const Z95: f64 = 1.959963984540054;
pub const Z99: f64 = 2.5758293035489004;

#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    BudgetExceeded { required: u128, budget: u128 },
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::BudgetExceeded { required, budget } => {
                write!(f, "enumeration needs {required} steps, budget is {budget}")
            }
        }
    }
}

impl core::error::Error for SimError {}

/// A probability estimate with its Wilson confidence radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub radius: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, radius: 0.0 }
    }
}

/// Wilson score interval `(center, radius)` for `successes / trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials > 0);
    let n = trials as f64;
    let k = successes as f64;
    let z2 = z * z;
    let center = (k + z2 / 2.0) / (n + z2);
    let radius = z / (n + z2) * math::sqrt(k * (n - k) / n + z2 / 4.0);
    (center, radius)
}

/// Wilson estimate at 95%.
pub fn estimate95(successes: u64, trials: u64) -> Estimate {
    let (center, radius) = wilson_interval(successes, trials, Z95);
    let _ = center;
    Estimate { value: successes as f64 / trials as f64, radius }
}

/// One honest transmission of `word` for message `m`: samples channel noise
/// and returns whether both decoders output `m`.
pub fn honest_trial(
    sampler: &ChannelSampler<'_>,
    word: &[usize],
    m: usize,
    decoder: &dyn ConsensusDecoder,
    seed: u64,
    index: u64,
) -> bool {
    let mut rng = trial_rng(seed, index);
    let shared = decoder.needs_shared().then(|| BitVec::random(word.len(), &mut rng));
    let (y, z) = sampler.sample_word(word, &mut rng);
    let gb = decoder.decode(Side::B, &y, shared.as_ref());
    let gc = decoder.decode(Side::C, &z, shared.as_ref());
    gb.is_message(m) && gc.is_message(m)
}

/// One adversarial transmission: draws the attack word, then channel noise,
/// and returns both decoder outputs.
pub fn attack_trial(
    sampler: &ChannelSampler<'_>,
    plan: &AttackPlan<'_>,
    decoder: &dyn ConsensusDecoder,
    seed: u64,
    index: u64,
) -> (DecodeOutcome, DecodeOutcome) {
    let mut rng = trial_rng(seed, index);
    let word = plan.generate(&mut rng);
    let shared = decoder.needs_shared().then(|| BitVec::random(word.len(), &mut rng));
    let (y, z) = sampler.sample_word(&word, &mut rng);
    (
        decoder.decode(Side::B, &y, shared.as_ref()),
        decoder.decode(Side::C, &z, shared.as_ref()),
    )
}

/// Per-message honest failure counts over `trials_per_message` trials each.
pub fn run_honest_trials(
    channel: &BroadcastChannel,
    codebook: &Codebook,
    decoder: &dyn ConsensusDecoder,
    trials_per_message: u64,
    seed: u64,
) -> Vec<u64> {
    let sampler = ChannelSampler::new(channel);
    (0..codebook.k())
        .map(|m| {
            let base = m as u64 * trials_per_message;
            (0..trials_per_message)
                .filter(|i| !honest_trial(&sampler, codebook.word(m), m, decoder, seed, base + i))
                .count() as u64
        })
        .collect()
}

/// Disagreement tallies for one attack plan.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DisagreementCounts {
    /// `g_B != g_C` (a Bot on one side only counts).
    pub strict: u64,
    /// Both sides output messages and they differ; the lenient variant that
    /// would treat `(Bot, m)` as agreement.
    pub lenient: u64,
    pub trials: u64,
}

pub fn run_attack_trials(
    channel: &BroadcastChannel,
    plan: &AttackPlan<'_>,
    decoder: &dyn ConsensusDecoder,
    trials: u64,
    seed: u64,
) -> DisagreementCounts {
    let sampler = ChannelSampler::new(channel);
    let mut counts = DisagreementCounts { trials, ..Default::default() };
    for i in 0..trials {
        let (gb, gc) = attack_trial(&sampler, plan, decoder, seed, i);
        tally_disagreement(&mut counts, gb, gc);
    }
    counts
}

pub fn tally_disagreement(counts: &mut DisagreementCounts, gb: DecodeOutcome, gc: DecodeOutcome) {
    if gb != gc {
        counts.strict += 1;
        if matches!((gb, gc), (DecodeOutcome::Message(_), DecodeOutcome::Message(_))) {
            counts.lenient += 1;
        }
    }
}

/// Honest trial for a linear codebook: the message is a uniformly random bit
/// vector drawn from the trial stream.
pub fn linear_honest_trial(
    sampler: &ChannelSampler<'_>,
    decoder: &LinearErasureDecoder,
    seed: u64,
    index: u64,
) -> bool {
    let mut rng = trial_rng(seed, index);
    let message = BitVec::random(decoder.code().k(), &mut rng);
    let word = decoder.code().encode(&message).to_bits();
    let (y, z) = sampler.sample_word(&word, &mut rng);
    decoder.decode_linear(&y) == LinearOutcome::Message(message.clone())
        && decoder.decode_linear(&z) == LinearOutcome::Message(message)
}

/// Attack trial for a linear codebook.
pub fn linear_attack_trial(
    sampler: &ChannelSampler<'_>,
    plan: &AttackPlan<'_>,
    decoder: &LinearErasureDecoder,
    seed: u64,
    index: u64,
) -> (LinearOutcome, LinearOutcome) {
    let mut rng = trial_rng(seed, index);
    let word = plan.generate(&mut rng);
    let (y, z) = sampler.sample_word(&word, &mut rng);
    (decoder.decode_linear(&y), decoder.decode_linear(&z))
}

/// Full error report of an experiment.
#[derive(Debug, Clone)]
pub struct ErrorReport {
    pub lambda_per_message: Vec<Estimate>,
    pub lambda_max: Estimate,
    pub eta_per_attack: Vec<(String, Estimate)>,
    pub eta_max: Option<Estimate>,
    /// Worst lenient disagreement rate; always at most the strict `eta_max`.
    pub eta_lenient_max: Option<f64>,
    pub p_e: f64,
    pub trials: u64,
    pub seed: u64,
    pub exact: bool,
}

impl ErrorReport {
    pub fn from_counts(
        lambda_failures: &[u64],
        trials_per_message: u64,
        attacks: Vec<(String, DisagreementCounts)>,
        seed: u64,
    ) -> Self {
        let lambda_per_message: Vec<Estimate> = lambda_failures
            .iter()
            .map(|&f| estimate95(f, trials_per_message))
            .collect();
        let lambda_max = lambda_per_message
            .iter()
            .copied()
            .max_by(|a, b| a.value.partial_cmp(&b.value).expect("finite"))
            .unwrap_or(Estimate::exact(0.0));
        let eta_per_attack: Vec<(String, Estimate)> = attacks
            .iter()
            .map(|(label, c)| (label.clone(), estimate95(c.strict, c.trials)))
            .collect();
        let eta_max = eta_per_attack
            .iter()
            .map(|(_, e)| *e)
            .max_by(|a, b| a.value.partial_cmp(&b.value).expect("finite"));
        let eta_lenient_max = attacks
            .iter()
            .map(|(_, c)| c.lenient as f64 / c.trials as f64)
            .max_by(|a, b| a.partial_cmp(b).expect("finite"));
        let total_trials = lambda_failures.len() as u64 * trials_per_message
            + attacks.iter().map(|(_, c)| c.trials).sum::<u64>();
        let p_e = lambda_max.value.max(eta_max.map_or(0.0, |e| e.value));
        ErrorReport {
            lambda_per_message,
            lambda_max,
            eta_per_attack,
            eta_max,
            eta_lenient_max,
            p_e,
            trials: total_trials,
            seed,
            exact: false,
        }
    }
}

/// Per-coordinate output-pair distribution used by the exact engine.
#[derive(Debug, Clone)]
pub struct CoordinateDist(pub Vec<(usize, usize, f64)>);

/// Supports of `W(.,.|x_i)` along an input word.
pub fn coordinate_dists(channel: &BroadcastChannel, word: &[usize]) -> Vec<CoordinateDist> {
    word.iter().map(|&x| CoordinateDist(channel.support_of(x))).collect()
}

/// As [`coordinate_dists`], with each letter first resampled through a
/// mixing kernel: the coordinate distribution becomes the kernel-weighted
/// mixture of the rows reachable from `x_i`.
pub fn coordinate_dists_mixed(
    channel: &BroadcastChannel,
    word: &[usize],
    kernel: &crate::common::MixingKernel,
) -> Vec<CoordinateDist> {
    let ny = channel.y_alphabet().len();
    let nz = channel.z_alphabet().len();
    word.iter()
        .map(|&x| {
            let mut dense = alloc::vec![0.0; ny * nz];
            for x2 in 0..kernel.dim() {
                let w = kernel.prob(x, x2);
                if w > 0.0 {
                    for (y, z, p) in channel.support_of(x2) {
                        dense[y * nz + z] += w * p;
                    }
                }
            }
            CoordinateDist(
                dense
                    .iter()
                    .enumerate()
                    .filter(|&(_, &p)| p > 0.0)
                    .map(|(i, &p)| (i / nz, i % nz, p))
                    .collect(),
            )
        })
        .collect()
}

/// Number of reachable output pairs for a coordinate-product distribution.
pub fn enumeration_size(dists: &[CoordinateDist]) -> u128 {
    dists.iter().fold(1u128, |acc, d| acc.saturating_mul(d.0.len() as u128))
}

/// Joint distribution of the two decoder outcomes, outcomes indexed
/// `0..k` for messages and `k` for the refusal symbol.
#[derive(Debug, Clone)]
pub struct OutcomePairTable {
    k: usize,
    probs: Vec<f64>,
}

impl OutcomePairTable {
    pub fn new(k: usize) -> Self {
        OutcomePairTable { k, probs: alloc::vec![0.0; (k + 1) * (k + 1)] }
    }

    fn idx(&self, o: DecodeOutcome) -> usize {
        match o {
            DecodeOutcome::Message(m) => m,
            DecodeOutcome::Bot => self.k,
        }
    }

    pub fn add(&mut self, gb: DecodeOutcome, gc: DecodeOutcome, p: f64) {
        let (b, c) = (self.idx(gb), self.idx(gc));
        self.probs[b * (self.k + 1) + c] += p;
    }

    pub fn merge_scaled(&mut self, other: &OutcomePairTable, weight: f64) {
        assert_eq!(self.k, other.k);
        for (a, b) in self.probs.iter_mut().zip(&other.probs) {
            *a += weight * b;
        }
    }

    /// `P(g_B = g_C = m)`.
    pub fn p_both(&self, m: usize) -> f64 {
        self.probs[m * (self.k + 1) + m]
    }

    /// `P(g_B != g_C)`.
    pub fn p_disagree(&self) -> f64 {
        let mut p = 0.0;
        for b in 0..=self.k {
            for c in 0..=self.k {
                if b != c {
                    p += self.probs[b * (self.k + 1) + c];
                }
            }
        }
        p
    }

    /// Disagreement with `(Bot, m)` pairs treated as agreement.
    pub fn p_disagree_lenient(&self) -> f64 {
        let mut p = 0.0;
        for b in 0..self.k {
            for c in 0..self.k {
                if b != c {
                    p += self.probs[b * (self.k + 1) + c];
                }
            }
        }
        p
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }
}

/// Exact outcome-pair distribution by depth-first enumeration of all
/// reachable output pairs, with probabilities accumulated as per-coordinate
/// products.
pub fn exact_outcome_table(
    dists: &[CoordinateDist],
    k: usize,
    budget: u128,
    decode_pair: &mut dyn FnMut(&[usize], &[usize]) -> (DecodeOutcome, DecodeOutcome),
) -> Result<OutcomePairTable, SimError> {
    let required = enumeration_size(dists);
    if required > budget {
        return Err(SimError::BudgetExceeded { required, budget });
    }
    let n = dists.len();
    let mut table = OutcomePairTable::new(k);
    let mut y = alloc::vec![0usize; n];
    let mut z = alloc::vec![0usize; n];
    fn recurse(
        dists: &[CoordinateDist],
        i: usize,
        p: f64,
        y: &mut Vec<usize>,
        z: &mut Vec<usize>,
        table: &mut OutcomePairTable,
        decode_pair: &mut dyn FnMut(&[usize], &[usize]) -> (DecodeOutcome, DecodeOutcome),
    ) {
        if i == dists.len() {
            let (gb, gc) = decode_pair(y, z);
            table.add(gb, gc, p);
            return;
        }
        for &(yi, zi, pi) in &dists[i].0 {
            y[i] = yi;
            z[i] = zi;
            recurse(dists, i + 1, p * pi, y, z, table, decode_pair);
        }
    }
    recurse(dists, 0, 1.0, &mut y, &mut z, &mut table, decode_pair);
    Ok(table)
}

/// Exact outcome table of a decoder on the given input word.
pub fn exact_table_for_input(
    channel: &BroadcastChannel,
    decoder: &dyn ConsensusDecoder,
    word: &[usize],
    k: usize,
    budget: u128,
) -> Result<OutcomePairTable, SimError> {
    assert!(!decoder.needs_shared(), "enumerate shared thresholds explicitly");
    let dists = coordinate_dists(channel, word);
    exact_outcome_table(&dists, k, budget, &mut |y, z| {
        (decoder.decode(Side::B, y, None), decoder.decode(Side::C, z, None))
    })
}

/// Result of the exhaustive small-instance search.
#[derive(Debug, Clone)]
pub struct ExhaustiveResult {
    pub p_e: f64,
    pub lambda: f64,
    pub eta: f64,
    /// The two codewords of the best encoder.
    pub encoder: [Vec<usize>; 2],
}

/// Minimum achievable `max(lambda, eta)` over all deterministic two-message
/// codes of block length `n`: every encoder pair, every decoder pair, with
/// `eta` maximized over every channel input word.
///
/// The search is exact and exponential; `budget` caps the number of decoder
/// evaluations (`n = 1` instances fit easily, `n = 2` needs a raised budget).
pub fn exhaustive_min_error(
    channel: &BroadcastChannel,
    n: usize,
    budget: u128,
) -> Result<ExhaustiveResult, SimError> {
    let nx = channel.x_alphabet().len();
    let ny = channel.y_alphabet().len();
    let nz = channel.z_alphabet().len();
    let sy = ny.pow(n as u32);
    let sz = nz.pow(n as u32);
    let decoder_pairs = 3u128
        .saturating_pow(sy as u32)
        .saturating_mul(3u128.saturating_pow(sz as u32));
    let inputs = nx.pow(n as u32);
    let required = decoder_pairs.saturating_mul((inputs * 26) as u128);
    if required > budget {
        return Err(SimError::BudgetExceeded { required, budget });
    }

    // Input words and their joint output-pair supports, with outputs encoded
    // as base-|Y| / base-|Z| indices of the product alphabets.
    let input_words: Vec<Vec<usize>> = product_words(nx, n);
    let supports: Vec<Vec<(usize, usize, f64)>> = input_words
        .iter()
        .map(|w| {
            let dists = coordinate_dists(channel, w);
            let mut flat = Vec::new();
            let mut stack: Vec<(usize, usize, usize, f64)> = alloc::vec![(0, 0, 0, 1.0)];
            while let Some((i, yi, zi, p)) = stack.pop() {
                if i == n {
                    flat.push((yi, zi, p));
                    continue;
                }
                for &(y, z, pi) in &dists[i].0 {
                    stack.push((i + 1, yi * ny + y, zi * nz + z, p * pi));
                }
            }
            flat
        })
        .collect();

    let mut best: Option<ExhaustiveResult> = None;
    // All ordered encoder pairs (f(0), f(1)).
    for e0 in 0..input_words.len() {
        for e1 in 0..input_words.len() {
            if e0 == e1 {
                continue;
            }
            // Enumerate decoder pairs: maps from product outputs to {0,1,Bot}.
            let mut gb = alloc::vec![0u8; sy];
            loop {
                let mut gc = alloc::vec![0u8; sz];
                loop {
                    let mut lambda: f64 = 0.0;
                    for (m, &e) in [e0, e1].iter().enumerate() {
                        let ok: f64 = supports[e]
                            .iter()
                            .filter(|&&(y, z, _)| {
                                gb[y] == m as u8 && gc[z] == m as u8
                            })
                            .map(|&(_, _, p)| p)
                            .sum();
                        lambda = lambda.max(1.0 - ok);
                    }
                    let mut eta: f64 = 0.0;
                    for support in &supports {
                        let dis: f64 = support
                            .iter()
                            .filter(|&&(y, z, _)| gb[y] != gc[z])
                            .map(|&(_, _, p)| p)
                            .sum();
                        eta = eta.max(dis);
                    }
                    let p_e = lambda.max(eta);
                    if best.as_ref().map_or(true, |b| p_e < b.p_e) {
                        best = Some(ExhaustiveResult {
                            p_e,
                            lambda,
                            eta,
                            encoder: [input_words[e0].clone(), input_words[e1].clone()],
                        });
                    }
                    if !increment_ternary(&mut gc) {
                        break;
                    }
                }
                if !increment_ternary(&mut gb) {
                    break;
                }
            }
        }
    }
    Ok(best.expect("at least one configuration"))
}

fn product_words(base: usize, n: usize) -> Vec<Vec<usize>> {
    let mut words = alloc::vec![alloc::vec![]];
    for _ in 0..n {
        let mut next = Vec::with_capacity(words.len() * base);
        for w in &words {
            for s in 0..base {
                let mut w2 = w.clone();
                w2.push(s);
                next.push(w2);
            }
        }
        words = next;
    }
    words
}

/// Odometer over {0,1,2}^len; returns false after wrapping around.
fn increment_ternary(digits: &mut [u8]) -> bool {
    for d in digits.iter_mut() {
        if *d < 2 {
            *d += 1;
            return true;
        }
        *d = 0;
    }
    false
}
