//! Byzantine sender strategies.
//!
//! Three families, all derived from ways a malicious sender can stay hard to
//! detect: per-letter resampling through an undetectable mixing kernel,
//! flipping a few coordinates of a codeword to sit near the decoder's
//! tolerance boundary, and prefix-swapped hybrids of two codewords.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand_core::RngCore;

use crate::common::MixingKernel;
use crate::pmf::Pmf;
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
pub enum AdversaryError {
    FlipsExceedLength { flips: usize, n: usize },
    LengthMismatch { left: usize, right: usize },
    PrefixOutOfRange { prefix: usize, n: usize },
    NotBinary,
}

impl fmt::Display for AdversaryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdversaryError::FlipsExceedLength { flips, n } => {
                write!(f, "cannot flip {flips} of {n} coordinates")
            }
            AdversaryError::LengthMismatch { left, right } => {
                write!(f, "codeword lengths differ: {left} vs {right}")
            }
            AdversaryError::PrefixOutOfRange { prefix, n } => {
                write!(f, "prefix {prefix} outside [0, {n}]")
            }
            AdversaryError::NotBinary => write!(f, "boundary attack needs a binary codeword"),
        }
    }
}

impl core::error::Error for AdversaryError {}

/// A channel-input word together with the strategy that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackInput {
    pub word: Vec<usize>,
    pub provenance: String,
}

/// Passes a codeword coordinate-wise through a mixing kernel.
pub fn mixing_attack(
    codeword: &[usize],
    kernel: &MixingKernel,
    rng: &mut impl RngCore,
) -> AttackInput {
    let word = codeword
        .iter()
        .map(|&x| {
            let row = Pmf::normalized(kernel.row(x).to_vec());
            row.sample_with(rng::uniform_f64(rng))
        })
        .collect();
    AttackInput { word, provenance: format!("mixing(off_diag={})", kernel.off_diagonal_mass()) }
}

/// Flips `flips` uniformly chosen distinct coordinates of a binary codeword.
pub fn boundary_attack(
    codeword: &[usize],
    flips: usize,
    rng: &mut impl RngCore,
) -> Result<AttackInput, AdversaryError> {
    if flips > codeword.len() {
        return Err(AdversaryError::FlipsExceedLength { flips, n: codeword.len() });
    }
    if codeword.iter().any(|&b| b > 1) {
        return Err(AdversaryError::NotBinary);
    }
    let mut word = codeword.to_vec();
    for i in rng::sample_distinct(rng, codeword.len(), flips) {
        word[i] = 1 - word[i];
    }
    Ok(AttackInput { word, provenance: format!("boundary(flips={flips})") })
}

/// Number of flips that keeps the attack strictly inside relative distance
/// `delta` of the codeword: `floor(n delta) - 1` (clamped at zero).
pub fn boundary_flip_count(n: usize, delta: f64) -> usize {
    let inside = libm::floor(n as f64 * delta) as usize;
    inside.saturating_sub(1)
}

/// Prefix-swap hybrid: the first `prefix` coordinates from `second`, the
/// rest from `first`. Sweeping the prefix from 0 to n interpolates between
/// the two codewords.
pub fn hybrid_attack(
    first: &[usize],
    second: &[usize],
    prefix: usize,
) -> Result<AttackInput, AdversaryError> {
    if first.len() != second.len() {
        return Err(AdversaryError::LengthMismatch { left: first.len(), right: second.len() });
    }
    if prefix > first.len() {
        return Err(AdversaryError::PrefixOutOfRange { prefix, n: first.len() });
    }
    let word = second[..prefix]
        .iter()
        .chain(&first[prefix..])
        .copied()
        .collect();
    Ok(AttackInput { word, provenance: format!("hybrid(prefix={prefix})") })
}

/// A reusable attack recipe that draws a fresh input word per trial.
#[derive(Debug, Clone)]
pub enum AttackPlan<'a> {
    Mixing { codeword: &'a [usize], kernel: &'a MixingKernel },
    Boundary { codeword: &'a [usize], flips: usize },
    Hybrid { first: &'a [usize], second: &'a [usize], prefix: usize },
    /// A fixed, precomputed input word.
    Fixed { word: &'a [usize], label: &'a str },
}

impl AttackPlan<'_> {
    pub fn label(&self) -> String {
        match self {
            AttackPlan::Mixing { .. } => String::from("mixing"),
            AttackPlan::Boundary { flips, .. } => format!("boundary(flips={flips})"),
            AttackPlan::Hybrid { prefix, .. } => format!("hybrid(prefix={prefix})"),
            AttackPlan::Fixed { label, .. } => String::from(*label),
        }
    }

    pub fn generate(&self, rng: &mut impl RngCore) -> Vec<usize> {
        match self {
            AttackPlan::Mixing { codeword, kernel } => mixing_attack(codeword, kernel, rng).word,
            AttackPlan::Boundary { codeword, flips } => {
                boundary_attack(codeword, *flips, rng).expect("validated at plan build").word
            }
            AttackPlan::Hybrid { first, second, prefix } => {
                hybrid_attack(first, second, *prefix).expect("validated at plan build").word
            }
            AttackPlan::Fixed { word, .. } => word.to_vec(),
        }
    }
}
