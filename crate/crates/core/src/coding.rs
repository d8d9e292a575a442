//! Codebook constructions and the relative distance they are measured by.
//!
//! Two constructions are provided: a greedy Gilbert-Varshamov style binary
//! codebook with a hard minimum-distance bound, and a constant-type codebook
//! over the effective input alphabet whose codewords share one empirical
//! distribution and keep pairwise relative distance at least `2 * delta`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use rand_core::RngCore;

use crate::common::CommonStructure;
use crate::math;
use crate::rng;
use crate::types::{pair_type, pair_mutual_information};

#[derive(Debug, Clone, PartialEq)]
pub enum CodingError {
    LengthMismatch { left: usize, right: usize },
    SymbolOutOfRange,
    /// The requested distribution is not an exact type with denominator `n`.
    TypeInfeasible,
    /// The sampling budget ran out before `k` codewords were kept; the rate
    /// is too close to what the distance bound permits at this block length.
    ConstructionFailed { attempts: usize },
    /// `floor(2^{nR})` does not fit the construction budget.
    TooManyMessages,
    /// The requested rate exceeds what the distance bound permits.
    RateInfeasible { rate: f64, bound: f64 },
    DistanceViolation { i: usize, j: usize },
    ProfileViolation { word: usize },
}

impl fmt::Display for CodingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodingError::LengthMismatch { left, right } => {
                write!(f, "sequence lengths differ: {left} vs {right}")
            }
            CodingError::SymbolOutOfRange => write!(f, "symbol outside the declared alphabet"),
            CodingError::TypeInfeasible => {
                write!(f, "distribution is not an exact n-type")
            }
            CodingError::ConstructionFailed { attempts } => {
                write!(f, "codebook construction failed after {attempts} attempts")
            }
            CodingError::TooManyMessages => {
                write!(f, "message count exceeds the explicit-codebook budget")
            }
            CodingError::RateInfeasible { rate, bound } => {
                write!(f, "rate {rate} exceeds the distance-feasible bound {bound}")
            }
            CodingError::DistanceViolation { i, j } => {
                write!(f, "codewords {i} and {j} violate the declared distance")
            }
            CodingError::ProfileViolation { word } => {
                write!(f, "codeword {word} does not match the declared type profile")
            }
        }
    }
}

impl core::error::Error for CodingError {}

/// Explicit codebook budget for `floor(2^{nR})` message counts.
pub const MAX_EXPLICIT_MESSAGES: usize = 1 << 20;

/// `floor(2^{nR})`, or `None` if it exceeds [`MAX_EXPLICIT_MESSAGES`].
pub fn message_count(n: usize, rate: f64) -> Option<usize> {
    let bits = n as f64 * rate;
    if bits >= math::log2(MAX_EXPLICIT_MESSAGES as f64) + 1e-9 {
        return None;
    }
    Some(math::floor(math::exp2(bits)) as usize)
}

/// An encoder `f: [1:K] -> symbols^n` stored as an explicit word list.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    n: usize,
    alphabet_size: usize,
    words: Vec<Vec<usize>>,
    /// Declared minimum pairwise Hamming distance (absolute).
    declared_min_distance: usize,
    /// Symbol counts every codeword shares, when constant-type.
    type_profile: Option<Vec<u64>>,
}

impl Codebook {
    /// Builds a codebook from explicit words, enforcing the declared
    /// invariants: equal lengths, symbol range, pairwise distance, and (when
    /// given) an exact shared type profile.
    pub fn from_words(
        alphabet_size: usize,
        words: Vec<Vec<usize>>,
        declared_min_distance: usize,
        type_profile: Option<Vec<u64>>,
    ) -> Result<Self, CodingError> {
        assert!(!words.is_empty());
        let n = words[0].len();
        for w in &words {
            if w.len() != n {
                return Err(CodingError::LengthMismatch { left: n, right: w.len() });
            }
            if w.iter().any(|&s| s >= alphabet_size) {
                return Err(CodingError::SymbolOutOfRange);
            }
        }
        if let Some(profile) = &type_profile {
            for (m, w) in words.iter().enumerate() {
                let mut counts = alloc::vec![0u64; alphabet_size];
                for &s in w {
                    counts[s] += 1;
                }
                if &counts != profile {
                    return Err(CodingError::ProfileViolation { word: m });
                }
            }
        }
        for i in 0..words.len() {
            for j in i + 1..words.len() {
                if hamming(&words[i], &words[j]) < declared_min_distance {
                    return Err(CodingError::DistanceViolation { i, j });
                }
            }
        }
        Ok(Codebook { n, alphabet_size, words, declared_min_distance, type_profile })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.words.len()
    }

    pub fn rate(&self) -> f64 {
        math::log2(self.k() as f64) / self.n as f64
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn word(&self, m: usize) -> &[usize] {
        &self.words[m]
    }

    pub fn words(&self) -> &[Vec<usize>] {
        &self.words
    }

    pub fn declared_min_distance(&self) -> usize {
        self.declared_min_distance
    }

    pub fn type_profile(&self) -> Option<&[u64]> {
        self.type_profile.as_deref()
    }

    /// Exhaustive minimum pairwise Hamming distance.
    pub fn min_pairwise_distance(&self) -> usize {
        let mut best = usize::MAX;
        for i in 0..self.words.len() {
            for j in i + 1..self.words.len() {
                best = best.min(hamming(&self.words[i], &self.words[j]));
            }
        }
        best
    }

    /// Binary codewords packed into 64-bit blocks for fast distance counts.
    pub fn packed(&self) -> Option<Vec<Vec<u64>>> {
        if self.alphabet_size != 2 {
            return None;
        }
        Some(self.words.iter().map(|w| pack_bits(w)).collect())
    }
}

/// Packs a 0/1 word into u64 blocks, least-significant bit first.
pub fn pack_bits(word: &[usize]) -> Vec<u64> {
    let mut blocks = alloc::vec![0u64; word.len().div_ceil(64)];
    for (i, &b) in word.iter().enumerate() {
        if b != 0 {
            blocks[i / 64] |= 1 << (i % 64);
        }
    }
    blocks
}

pub fn hamming(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Relative distance `d(u_word, x_word)` induced by the decomposition
/// kernel: the per-letter probability that resampling `x` through the kernel
/// misses the corresponding effective letter.
///
/// `u_word` indexes the effective alphabet; `x_word` indexes the full input
/// alphabet. On two effective-letter words this reduces to Hamming / n.
pub fn rel_distance(
    u_word: &[usize],
    x_word: &[usize],
    common: &CommonStructure,
) -> Result<f64, CodingError> {
    if u_word.len() != x_word.len() {
        return Err(CodingError::LengthMismatch { left: u_word.len(), right: x_word.len() });
    }
    let k = common.effective_alphabet().len();
    let mut total = 0.0;
    for (&u, &x) in u_word.iter().zip(x_word) {
        if u >= k {
            return Err(CodingError::SymbolOutOfRange);
        }
        total += 1.0 - common.ptilde(x, u);
    }
    Ok(total / u_word.len() as f64)
}

/// Mirror of [`rel_distance`] for two effective-letter words.
pub fn rel_distance_uu(a: &[usize], b: &[usize]) -> Result<f64, CodingError> {
    if a.len() != b.len() {
        return Err(CodingError::LengthMismatch { left: a.len(), right: b.len() });
    }
    Ok(hamming(a, b) as f64 / a.len() as f64)
}

/// Greedy Gilbert-Varshamov style binary codebook: uniformly random
/// candidates are kept while they stay at Hamming distance `>= distance`
/// from every kept word; the whole pass restarts with fresh randomness up to
/// `attempts` times.
pub fn gv_codebook_with_count(
    n: usize,
    k: usize,
    distance: usize,
    attempts: usize,
    rng: &mut impl RngCore,
) -> Result<Codebook, CodingError> {
    assert!(n > 0 && k > 0);
    for _ in 0..attempts {
        let mut kept: Vec<Vec<u64>> = Vec::with_capacity(k);
        let mut words: Vec<Vec<usize>> = Vec::with_capacity(k);
        let budget = 200usize.saturating_mul(k);
        for _ in 0..budget {
            let mut word = alloc::vec![0usize; n];
            for bit in word.iter_mut() {
                *bit = (rng.next_u64() & 1) as usize;
            }
            let packed = pack_bits(&word);
            let ok = kept.iter().all(|other| {
                packed
                    .iter()
                    .zip(other)
                    .map(|(a, b)| (a ^ b).count_ones() as usize)
                    .sum::<usize>()
                    >= distance
            });
            if ok {
                kept.push(packed);
                words.push(word);
                if words.len() == k {
                    return Codebook::from_words(2, words, distance, None);
                }
            }
        }
    }
    Err(CodingError::ConstructionFailed { attempts })
}

/// [`gv_codebook_with_count`] for `K = floor(2^{nR})` messages.
pub fn gv_codebook(
    n: usize,
    rate: f64,
    distance: usize,
    rng: &mut impl RngCore,
) -> Result<Codebook, CodingError> {
    let k = message_count(n, rate).ok_or(CodingError::TooManyMessages)?;
    gv_codebook_with_count(n, k, distance, 50, rng)
}

/// Constant-type codebook over an alphabet of `counts.len()` symbols.
///
/// Every codeword is a uniformly random arrangement of the base multiset
/// given by `counts` (an exact `n`-type); arrangements closer than `2 *
/// delta` in relative distance to an earlier kept word are expurgated during
/// construction. Fails after `attempts` fresh passes.
pub fn constant_type_codebook_with_count(
    counts: &[u64],
    k: usize,
    delta: f64,
    attempts: usize,
    rng: &mut impl RngCore,
) -> Result<Codebook, CodingError> {
    let n: u64 = counts.iter().sum();
    assert!(n > 0 && k > 0);
    let n = n as usize;
    let mut base = Vec::with_capacity(n);
    for (sym, &c) in counts.iter().enumerate() {
        for _ in 0..c {
            base.push(sym);
        }
    }
    let min_hamming = {
        // Smallest integer h with h/n >= 2 delta (within float slop).
        let target = 2.0 * delta * n as f64 - 1e-9;
        if target <= 0.0 {
            0
        } else {
            target as usize + 1
        }
    };
    for _ in 0..attempts {
        let mut words: Vec<Vec<usize>> = Vec::with_capacity(k);
        let budget = 200usize.saturating_mul(k);
        for _ in 0..budget {
            let mut word = base.clone();
            rng::shuffle(rng, &mut word);
            if words.iter().all(|w| hamming(w, &word) >= min_hamming) {
                words.push(word);
                if words.len() == k {
                    return Codebook::from_words(
                        counts.len(),
                        words,
                        min_hamming,
                        Some(counts.to_vec()),
                    );
                }
            }
        }
    }
    Err(CodingError::ConstructionFailed { attempts })
}

/// [`constant_type_codebook_with_count`] taking a probability vector that
/// must be an exact `n`-type, with `K = floor(2^{nR})`.
pub fn constant_type_codebook(
    n: usize,
    rate: f64,
    profile: &[f64],
    delta: f64,
    rng: &mut impl RngCore,
) -> Result<Codebook, CodingError> {
    let mut counts = Vec::with_capacity(profile.len());
    let mut total = 0u64;
    for &p in profile {
        let scaled = p * n as f64;
        let rounded = libm::round(scaled);
        if math::abs(scaled - rounded) > 1e-9 || rounded < 0.0 {
            return Err(CodingError::TypeInfeasible);
        }
        counts.push(rounded as u64);
        total += rounded as u64;
    }
    if total != n as u64 {
        return Err(CodingError::TypeInfeasible);
    }
    let k = message_count(n, rate).ok_or(CodingError::TooManyMessages)?;
    constant_type_codebook_with_count(&counts, k, delta, 50, rng)
}

/// One joint-type bucket from [`verify_codebook_properties`].
#[derive(Debug, Clone)]
pub struct TypeBucket {
    /// Flattened (codeword symbol, probe symbol) counts.
    pub counts: Vec<u64>,
    /// Number of codewords realizing this joint type with the probe.
    pub messages: usize,
    /// `2^{n(|R - I(U;X)|^+ + eps)}`.
    pub bound: f64,
    pub mutual_information: f64,
}

/// Report of the type-count property against one probe word.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub buckets: Vec<TypeBucket>,
    /// Indices into `buckets` whose message count exceeds the bound.
    pub violations: Vec<usize>,
}

/// Counts, for every joint type realized between codewords and the probe,
/// how many codewords land in that type class, and compares the count with
/// the packing bound `2^{n(|R - I(U;X)|^+ + eps)}`.
pub fn verify_codebook_properties(
    codebook: &Codebook,
    probe: &[usize],
    probe_alphabet_size: usize,
    epsilon: f64,
) -> Result<VerifyReport, CodingError> {
    if probe.len() != codebook.n() {
        return Err(CodingError::LengthMismatch { left: codebook.n(), right: probe.len() });
    }
    let n = codebook.n();
    let rate = codebook.rate();
    let mut groups: BTreeMap<Vec<u64>, Vec<usize>> = BTreeMap::new();
    for m in 0..codebook.k() {
        let t = pair_type(codebook.word(m), probe, codebook.alphabet_size(), probe_alphabet_size)
            .expect("equal lengths checked");
        let mut key = alloc::vec![0u64; codebook.alphabet_size() * probe_alphabet_size];
        for u in 0..codebook.alphabet_size() {
            for x in 0..probe_alphabet_size {
                key[u * probe_alphabet_size + x] = t.count(&[u, x]);
            }
        }
        groups.entry(key).or_default().push(m);
    }
    let mut buckets = Vec::with_capacity(groups.len());
    let mut violations = Vec::new();
    for (counts, members) in groups {
        let rep = members[0];
        let t = pair_type(codebook.word(rep), probe, codebook.alphabet_size(), probe_alphabet_size)
            .expect("equal lengths checked");
        let mi = pair_mutual_information(&t);
        let exponent = (rate - mi).max(0.0) + epsilon;
        let bound = math::exp2(n as f64 * exponent);
        if members.len() as f64 > bound {
            violations.push(buckets.len());
        }
        buckets.push(TypeBucket {
            counts,
            messages: members.len(),
            bound,
            mutual_information: mi,
        });
    }
    Ok(VerifyReport { buckets, violations })
}
