//! Parallel Monte Carlo drivers. Trials are keyed by `(seed, index)`, so
//! sharding across a rayon pool changes nothing but wall time.

use rayon::prelude::*;

use consensus_lab_core::adversary::AttackPlan;
use consensus_lab_core::channel::{BroadcastChannel, ChannelSampler};
use consensus_lab_core::coding::Codebook;
use consensus_lab_core::decoding::{ConsensusDecoder, LinearErasureDecoder, LinearOutcome};
use consensus_lab_core::sim::{
    attack_trial, honest_trial, linear_attack_trial, linear_honest_trial, tally_disagreement,
    DisagreementCounts,
};

/// Trials below this count stay sequential.
const PAR_THRESHOLD: u64 = 4096;

/// Per-message honest failure counts, `trials_per_message` trials each.
pub fn par_honest_failures(
    channel: &BroadcastChannel,
    codebook: &Codebook,
    decoder: &(dyn ConsensusDecoder + Sync),
    trials_per_message: u64,
    seed: u64,
) -> Vec<u64> {
    let sampler = ChannelSampler::new(channel);
    (0..codebook.k())
        .map(|m| {
            let base = m as u64 * trials_per_message;
            let word = codebook.word(m);
            if trials_per_message < PAR_THRESHOLD {
                (0..trials_per_message)
                    .filter(|i| !honest_trial(&sampler, word, m, decoder, seed, base + i))
                    .count() as u64
            } else {
                (0..trials_per_message)
                    .into_par_iter()
                    .filter(|i| !honest_trial(&sampler, word, m, decoder, seed, base + i))
                    .count() as u64
            }
        })
        .collect()
}

/// Aggregate honest failures with the message cycling over trial indices;
/// used when per-message stratification would leave too few trials each.
pub fn par_honest_failures_mixed(
    channel: &BroadcastChannel,
    codebook: &Codebook,
    decoder: &(dyn ConsensusDecoder + Sync),
    trials: u64,
    seed: u64,
) -> u64 {
    let sampler = ChannelSampler::new(channel);
    let k = codebook.k() as u64;
    (0..trials)
        .into_par_iter()
        .filter(|&i| {
            let m = (i % k) as usize;
            !honest_trial(&sampler, codebook.word(m), m, decoder, seed, i)
        })
        .count() as u64
}

/// Disagreement counts for one attack plan.
pub fn par_attack_counts(
    channel: &BroadcastChannel,
    plan: &AttackPlan<'_>,
    decoder: &(dyn ConsensusDecoder + Sync),
    trials: u64,
    seed: u64,
) -> DisagreementCounts {
    let sampler = ChannelSampler::new(channel);
    let fold = |mut counts: DisagreementCounts, i: u64| {
        let (gb, gc) = attack_trial(&sampler, plan, decoder, seed, i);
        tally_disagreement(&mut counts, gb, gc);
        counts
    };
    let mut counts = if trials < PAR_THRESHOLD {
        (0..trials).fold(DisagreementCounts::default(), fold)
    } else {
        (0..trials)
            .into_par_iter()
            .fold(DisagreementCounts::default, fold)
            .reduce(DisagreementCounts::default, |a, b| DisagreementCounts {
                strict: a.strict + b.strict,
                lenient: a.lenient + b.lenient,
                trials: a.trials + b.trials,
            })
    };
    counts.trials = trials;
    counts
}

/// Honest failures of a linear-codebook scheme over random messages.
pub fn par_linear_honest_failures(
    channel: &BroadcastChannel,
    decoder: &LinearErasureDecoder,
    trials: u64,
    seed: u64,
) -> u64 {
    let sampler = ChannelSampler::new(channel);
    (0..trials)
        .into_par_iter()
        .filter(|&i| !linear_honest_trial(&sampler, decoder, seed, i))
        .count() as u64
}

/// Disagreement counts of a linear-codebook scheme under one attack plan.
pub fn par_linear_attack_counts(
    channel: &BroadcastChannel,
    plan: &AttackPlan<'_>,
    decoder: &LinearErasureDecoder,
    trials: u64,
    seed: u64,
) -> DisagreementCounts {
    let sampler = ChannelSampler::new(channel);
    let fold = |mut counts: DisagreementCounts, i: u64| {
        let (gb, gc) = linear_attack_trial(&sampler, plan, decoder, seed, i);
        if gb != gc {
            counts.strict += 1;
            if matches!(
                (&gb, &gc),
                (LinearOutcome::Message(_), LinearOutcome::Message(_))
            ) {
                counts.lenient += 1;
            }
        }
        counts
    };
    let mut counts = (0..trials)
        .into_par_iter()
        .fold(DisagreementCounts::default, fold)
        .reduce(DisagreementCounts::default, |a, b| DisagreementCounts {
            strict: a.strict + b.strict,
            lenient: a.lenient + b.lenient,
            trials: a.trials + b.trials,
        });
    counts.trials = trials;
    counts
}
