//! Consensus decoders.
//!
//! All decoders are total and deterministic: every received word maps to
//! exactly one outcome, either a message index or the refusal symbol.
//!
//! * [`ErasureSchemeDecoder`]: the two-condition decoder for the two-step
//!   erasure family. A message is accepted when the codeword matches every
//!   output position left unerased by the common channel (a condition both
//!   receivers evaluate identically) and some explaining input word within
//!   relative distance `delta` of the codeword is consistent with the
//!   private output.
//! * [`ExplainOnlyDecoder`]: the naive single-condition decoder that accepts
//!   when the codeword alone explains the private output exactly; used to
//!   demonstrate the one-bit-flip attack.
//! * [`GeneralTypeDecoder`]: the joint-type decoder for arbitrary channels,
//!   with both conditions expressed as KL-divergence tests at threshold
//!   `3 * epsilon`; the explaining-vector condition is decided by convex
//!   feasibility over conditional distributions.
//! * [`SharedRandDecoder`]: the receiver-shared-randomness threshold decoder
//!   over a minimum-distance binary codebook for the independent erasure
//!   pair.
//! * [`LinearErasureDecoder`]: the erasure-scheme decoder over a binary
//!   linear codebook, searching the affine set of common-consistent messages
//!   instead of enumerating codewords, which keeps true-rate block lengths
//!   tractable.

use alloc::vec::Vec;
use core::fmt;
use core::sync::atomic::{AtomicU64, Ordering};

use crate::channel::{Alphabet, BroadcastChannel, PointToPointChannel, Receiver};
use crate::coding::Codebook;
use crate::common::CommonStructure;
use crate::gf2::{BitVec, LinearCode};
use crate::solver::klmin::constrained_channel_kl_min;
use crate::types::{kl_vs_channel, pair_type};

/// Slack added to the `3 * epsilon` threshold of the general decoder so that
/// acceptance does not depend on the last iterations of the feasibility
/// solver.
pub const SOLVER_SLACK: f64 = 1e-7;

/// Which receiver a decoder instance is acting as.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    B,
    C,
}

/// Decoder output: a message index or the refusal symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeOutcome {
    Message(usize),
    Bot,
}

impl DecodeOutcome {
    pub fn is_message(&self, m: usize) -> bool {
        matches!(self, DecodeOutcome::Message(x) if *x == m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DecodingError {
    BadDelta(f64),
    BadEpsilon(f64),
    /// No integer `l` satisfies `n delta / 8 < 2^l <= n delta / 4`.
    WindowEmpty { n: usize, delta: f64 },
    SharedTooShort { need: usize, got: usize },
    UnsupportedAlphabet,
    /// A codeword uses an input letter that realizes no polytope vertex.
    LetterOutsideVertexClasses { position: usize, letter: usize },
}

impl fmt::Display for DecodingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecodingError::BadDelta(d) => write!(f, "delta {d} outside (0,1)"),
            DecodingError::BadEpsilon(e) => write!(f, "epsilon {e} must be positive"),
            DecodingError::WindowEmpty { n, delta } => {
                write!(f, "no threshold window exists for n={n}, delta={delta}")
            }
            DecodingError::SharedTooShort { need, got } => {
                write!(f, "shared randomness too short: need {need} bits, got {got}")
            }
            DecodingError::UnsupportedAlphabet => {
                write!(f, "output alphabet does not match the erasure family layout")
            }
            DecodingError::LetterOutsideVertexClasses { position, letter } => {
                write!(
                    f,
                    "codeword letter {letter} at position {position} lies outside every vertex class"
                )
            }
        }
    }
}

impl core::error::Error for DecodingError {}

/// Distance / typicality tolerances shared by the decoding schemes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoderConfig {
    pub delta: f64,
    pub epsilon: f64,
}

impl DecoderConfig {
    pub fn new(delta: f64, epsilon: f64) -> Result<Self, DecodingError> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(DecodingError::BadDelta(delta));
        }
        if epsilon <= 0.0 {
            return Err(DecodingError::BadEpsilon(epsilon));
        }
        Ok(DecoderConfig { delta, epsilon })
    }
}

/// Smallest `l >= 0` with `2^l > n delta / 8`, required to satisfy
/// `2^l <= n delta / 4`.
pub fn choose_ell(n: usize, delta: f64) -> Result<u32, DecodingError> {
    let lower = n as f64 * delta / 8.0;
    let upper = n as f64 * delta / 4.0;
    let mut ell = 0u32;
    while (1u64 << ell) as f64 <= lower {
        ell += 1;
        if ell > 60 {
            return Err(DecodingError::WindowEmpty { n, delta });
        }
    }
    if (1u64 << ell) as f64 > upper {
        return Err(DecodingError::WindowEmpty { n, delta });
    }
    Ok(ell)
}

/// Threshold index from the first `ell` shared bits (big-endian), shifted to
/// the range `[1 : 2^ell]`; uniform bits give a uniform threshold.
pub fn h_index(shared: &BitVec, ell: u32) -> Result<usize, DecodingError> {
    let need = ell as usize;
    if shared.len() < need {
        return Err(DecodingError::SharedTooShort { need, got: shared.len() });
    }
    let mut v = 0usize;
    for i in 0..need {
        v = (v << 1) | usize::from(shared.get(i));
    }
    Ok(v + 1)
}

/// Symbol-role map for the erasure families. Output alphabets carry two
/// plain bit symbols, optionally two marked copies, and an erasure symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ErasureSymbols {
    plain: [usize; 2],
    tilde: Option<[usize; 2]>,
    erase: usize,
}

impl ErasureSymbols {
    /// Layout of [`crate::channel::make_two_step_bec`]: `0,1,0~,1~,e`.
    pub fn two_step() -> Self {
        ErasureSymbols { plain: [0, 1], tilde: Some([2, 3]), erase: 4 }
    }

    /// Layout of [`crate::channel::make_bec_pair`]: `0,1,e`.
    pub fn bec_pair() -> Self {
        ErasureSymbols { plain: [0, 1], tilde: None, erase: 2 }
    }

    /// Recovers the role map from symbol names.
    pub fn from_alphabet(alphabet: &Alphabet) -> Result<Self, DecodingError> {
        let find = |s: &str| alphabet.index_of(s);
        let (p0, p1, e) = match (find("0"), find("1"), find("e")) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => return Err(DecodingError::UnsupportedAlphabet),
        };
        let tilde = match (find("0~"), find("1~")) {
            (Some(a), Some(b)) => Some([a, b]),
            (None, None) => None,
            _ => return Err(DecodingError::UnsupportedAlphabet),
        };
        Ok(ErasureSymbols { plain: [p0, p1], tilde, erase: e })
    }

    #[inline]
    pub fn is_erase(&self, sym: usize) -> bool {
        sym == self.erase
    }

    /// Bit carried by a plain or marked symbol; `None` for the erasure.
    #[inline]
    pub fn bit_of(&self, sym: usize) -> Option<usize> {
        if sym == self.plain[0] {
            Some(0)
        } else if sym == self.plain[1] {
            Some(1)
        } else if let Some(t) = self.tilde {
            if sym == t[0] {
                Some(0)
            } else if sym == t[1] {
                Some(1)
            } else {
                None
            }
        } else {
            None
        }
    }

    /// Common-channel label: the bit for plain symbols, `None` (erased) for
    /// marked and erasure symbols.
    #[inline]
    pub fn common_bit(&self, sym: usize) -> Option<usize> {
        if sym == self.plain[0] {
            Some(0)
        } else if sym == self.plain[1] {
            Some(1)
        } else {
            None
        }
    }
}

/// A decoder bound to one codebook, decoding either receiver's output.
pub trait ConsensusDecoder: Sync {
    /// Decodes a received word; `shared` carries the receiver-shared random
    /// bits for schemes that use them.
    fn decode(&self, side: Side, received: &[usize], shared: Option<&BitVec>) -> DecodeOutcome;

    /// Whether [`ConsensusDecoder::decode`] expects shared bits.
    fn needs_shared(&self) -> bool {
        false
    }
}

/// Two-condition decoder of the erasure family over an explicit codebook.
pub struct ErasureSchemeDecoder<'a> {
    codebook: &'a Codebook,
    symbols: ErasureSymbols,
    delta: f64,
}

impl<'a> ErasureSchemeDecoder<'a> {
    pub fn new(codebook: &'a Codebook, symbols: ErasureSymbols, config: DecoderConfig) -> Self {
        ErasureSchemeDecoder { codebook, symbols, delta: config.delta }
    }

    /// Common-consistency: the codeword matches every position the common
    /// channel left unerased.
    fn common_consistent(&self, word: &[usize], received: &[usize]) -> bool {
        word.iter()
            .zip(received)
            .all(|(&w, &y)| match self.symbols.common_bit(y) {
                Some(bit) => bit == w,
                None => true,
            })
    }

    /// Minimal disagreement count of an explaining word: unerased positions
    /// are copied from the output, so only unerased mismatches remain.
    fn min_disagreement(&self, word: &[usize], received: &[usize]) -> usize {
        word.iter()
            .zip(received)
            .filter(|&(&w, &y)| matches!(self.symbols.bit_of(y), Some(bit) if bit != w))
            .count()
    }
}

impl ConsensusDecoder for ErasureSchemeDecoder<'_> {
    fn decode(&self, _side: Side, received: &[usize], _shared: Option<&BitVec>) -> DecodeOutcome {
        let n = self.codebook.n() as f64;
        let mut unique: Option<usize> = None;
        for m in 0..self.codebook.k() {
            let word = self.codebook.word(m);
            if !self.common_consistent(word, received) {
                continue;
            }
            if (self.min_disagreement(word, received) as f64) / n >= self.delta {
                continue;
            }
            if unique.is_some() {
                return DecodeOutcome::Bot;
            }
            unique = Some(m);
        }
        unique.map_or(DecodeOutcome::Bot, DecodeOutcome::Message)
    }
}

/// Naive decoder: accepts a message iff the codeword itself explains every
/// position of the private output (no error tolerance, no common-channel
/// check).
pub struct ExplainOnlyDecoder<'a> {
    codebook: &'a Codebook,
    symbols: ErasureSymbols,
}

impl<'a> ExplainOnlyDecoder<'a> {
    pub fn new(codebook: &'a Codebook, symbols: ErasureSymbols) -> Self {
        ExplainOnlyDecoder { codebook, symbols }
    }
}

impl ConsensusDecoder for ExplainOnlyDecoder<'_> {
    fn decode(&self, _side: Side, received: &[usize], _shared: Option<&BitVec>) -> DecodeOutcome {
        let mut unique: Option<usize> = None;
        for m in 0..self.codebook.k() {
            let word = self.codebook.word(m);
            let explains = word
                .iter()
                .zip(received)
                .all(|(&w, &y)| matches!(self.symbols.bit_of(y), Some(bit) if bit == w)
                    || self.symbols.is_erase(y));
            if !explains {
                continue;
            }
            if unique.is_some() {
                return DecodeOutcome::Bot;
            }
            unique = Some(m);
        }
        unique.map_or(DecodeOutcome::Bot, DecodeOutcome::Message)
    }
}

/// Joint-type decoder for general broadcast channels.
///
/// Message `m` is accepted iff
/// 1. the joint type of `(f(m), phi(received))` is within KL `3 epsilon` of
///    the codeword type driving the common channel, and
/// 2. some conditional distribution of an explaining letter given
///    `(f(m), received)` keeps the decomposition-kernel distance at most
///    `delta` while staying within KL `3 epsilon` (plus solver slack) of a
///    memoryless explanation.
pub struct GeneralTypeDecoder<'a> {
    codebook: &'a Codebook,
    /// Codewords converted to effective-letter indices.
    u_words: Vec<Vec<usize>>,
    common: &'a CommonStructure,
    w_y: PointToPointChannel,
    w_z: PointToPointChannel,
    config: DecoderConfig,
    solver_failures: AtomicU64,
}

impl<'a> GeneralTypeDecoder<'a> {
    /// `codebook` words are channel-input words; every letter must realize
    /// a polytope vertex (its class index is the effective letter).
    pub fn new(
        channel: &BroadcastChannel,
        common: &'a CommonStructure,
        codebook: &'a Codebook,
        config: DecoderConfig,
    ) -> Result<Self, DecodingError> {
        let mut u_words = Vec::with_capacity(codebook.k());
        for m in 0..codebook.k() {
            let mut u_word = Vec::with_capacity(codebook.n());
            for (position, &letter) in codebook.word(m).iter().enumerate() {
                let u = common
                    .class_of(letter)
                    .ok_or(DecodingError::LetterOutsideVertexClasses { position, letter })?;
                u_word.push(u);
            }
            u_words.push(u_word);
        }
        Ok(GeneralTypeDecoder {
            codebook,
            u_words,
            common,
            w_y: channel.marginal(Receiver::Y),
            w_z: channel.marginal(Receiver::Z),
            config,
            solver_failures: AtomicU64::new(0),
        })
    }

    /// Number of inner feasibility solves that failed (each one was treated
    /// as a rejection).
    pub fn solver_failures(&self) -> u64 {
        self.solver_failures.load(Ordering::Relaxed)
    }

    fn accepts(&self, side: Side, m: usize, received: &[usize]) -> bool {
        let threshold = 3.0 * self.config.epsilon;
        let word = &self.u_words[m];
        let k = self.common.effective_alphabet().len();
        let nv = self.common.common_channel().output().len();
        let phi = match side {
            Side::B => self.common.graph().phi_y(),
            Side::C => self.common.graph().phi_z(),
        };
        // Phantom labels (unreachable symbols) all collapse onto one extra
        // bucket that no input can produce.
        let v_word: Vec<usize> =
            received.iter().map(|&s| phi[s].min(nv)).collect();
        let t_uv = pair_type(word, &v_word, k, nv + 1).expect("equal lengths");
        let cc = self.common.common_channel();
        let effective = self.common.effective_alphabet();
        let kl1 = kl_vs_channel(&t_uv, |u, v| {
            if v < nv {
                cc.prob(effective[u], v)
            } else {
                0.0
            }
        });
        if kl1 > threshold + 1e-12 {
            return false;
        }

        let w = match side {
            Side::B => &self.w_y,
            Side::C => &self.w_z,
        };
        let ny = w.output().len();
        let nx = w.input().len();
        let t_uy = pair_type(word, received, k, ny).expect("equal lengths");
        let p_uy = t_uy.to_probs();
        let mut w_rows = alloc::vec![0.0; nx * ny];
        for x in 0..nx {
            for y in 0..ny {
                w_rows[x * ny + y] = w.prob(x, y);
            }
        }
        let mut cost = alloc::vec![0.0; k * nx];
        for u in 0..k {
            for x in 0..nx {
                cost[u * nx + x] = 1.0 - self.common.ptilde(x, u);
            }
        }
        match constrained_channel_kl_min(
            &p_uy,
            k,
            ny,
            &w_rows,
            nx,
            &cost,
            self.config.delta,
            2000,
        ) {
            Ok(min_kl) => min_kl <= threshold + SOLVER_SLACK,
            Err(_) => {
                self.solver_failures.fetch_add(1, Ordering::Relaxed);
                false
            }
        }
    }
}

impl ConsensusDecoder for GeneralTypeDecoder<'_> {
    fn decode(&self, side: Side, received: &[usize], _shared: Option<&BitVec>) -> DecodeOutcome {
        let mut unique: Option<usize> = None;
        for m in 0..self.codebook.k() {
            if !self.accepts(side, m, received) {
                continue;
            }
            if unique.is_some() {
                return DecodeOutcome::Bot;
            }
            unique = Some(m);
        }
        unique.map_or(DecodeOutcome::Bot, DecodeOutcome::Message)
    }
}

/// Shared-randomness threshold decoder over an explicit binary codebook for
/// the independent erasure pair.
///
/// With threshold `t = h(shared)`, message `m` is accepted iff the minimal
/// disagreement `|{i : y_i != e and y_i != f_i(m)}|` is at most `t`; the
/// output is the unique accepted message, else the refusal symbol.
pub struct SharedRandDecoder<'a> {
    codebook: &'a Codebook,
    packed_words: Vec<Vec<u64>>,
    symbols: ErasureSymbols,
    ell: u32,
}

impl<'a> SharedRandDecoder<'a> {
    pub fn new(codebook: &'a Codebook, symbols: ErasureSymbols, ell: u32) -> Self {
        let packed_words = codebook.packed().expect("binary codebook");
        SharedRandDecoder { codebook, packed_words, symbols, ell }
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    /// Decode with an explicit threshold (used by the exact-error engine to
    /// average over the threshold distribution).
    pub fn decode_with_threshold(&self, received: &[usize], t: usize) -> DecodeOutcome {
        // Pack the unerased positions and their bits once.
        let n = self.codebook.n();
        let mut known = BitVec::zeros(n);
        let mut bits = BitVec::zeros(n);
        for (i, &y) in received.iter().enumerate() {
            if let Some(b) = self.symbols.bit_of(y) {
                known.set(i, true);
                bits.set(i, b == 1);
            }
        }
        let mut unique: Option<usize> = None;
        for (m, word) in self.packed_words.iter().enumerate() {
            let count: usize = word
                .iter()
                .zip(bits.blocks().iter().zip(known.blocks()))
                .map(|(w, (b, k))| ((w ^ b) & k).count_ones() as usize)
                .sum();
            if count <= t {
                if unique.is_some() {
                    return DecodeOutcome::Bot;
                }
                unique = Some(m);
            }
        }
        unique.map_or(DecodeOutcome::Bot, DecodeOutcome::Message)
    }
}

impl ConsensusDecoder for SharedRandDecoder<'_> {
    fn decode(&self, _side: Side, received: &[usize], shared: Option<&BitVec>) -> DecodeOutcome {
        let shared = shared.expect("shared-randomness decoder needs shared bits");
        let t = h_index(shared, self.ell).expect("shared word at least ell bits");
        self.decode_with_threshold(received, t)
    }

    fn needs_shared(&self) -> bool {
        true
    }
}

/// Outcome of a linear-codebook decode: the message is a bit vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinearOutcome {
    Message(BitVec),
    Bot,
}

/// Erasure-scheme decoder over a binary linear code.
///
/// Common-consistency pins the codeword on every plainly received position,
/// which is a linear system in the message bits; the decoder enumerates the
/// affine solution set (its dimension is tiny once a constant fraction of
/// positions arrive plainly) and applies the distance condition to each
/// candidate.
pub struct LinearErasureDecoder {
    code: LinearCode,
    symbols: ErasureSymbols,
    delta: f64,
    /// Enumeration guard: solution sets of dimension above this are treated
    /// as refusals (probability decays exponentially in the block length).
    max_enumeration_dim: usize,
    dim_overflows: AtomicU64,
}

impl LinearErasureDecoder {
    pub fn new(code: LinearCode, symbols: ErasureSymbols, config: DecoderConfig) -> Self {
        LinearErasureDecoder {
            code,
            symbols,
            delta: config.delta,
            max_enumeration_dim: 22,
            dim_overflows: AtomicU64::new(0),
        }
    }

    pub fn code(&self) -> &LinearCode {
        &self.code
    }

    pub fn dim_overflows(&self) -> u64 {
        self.dim_overflows.load(Ordering::Relaxed)
    }

    pub fn decode_linear(&self, received: &[usize]) -> LinearOutcome {
        let n = self.code.n();
        debug_assert_eq!(received.len(), n);
        // Plain positions pin codeword bits; marked positions only count
        // toward the distance condition.
        let mut plain_positions = Vec::new();
        let mut targets = BitVec::zeros(n);
        let mut marked_mask = BitVec::zeros(n);
        let mut marked_bits = BitVec::zeros(n);
        for (i, &y) in received.iter().enumerate() {
            match self.symbols.common_bit(y) {
                Some(bit) => {
                    plain_positions.push(i);
                    targets.set(i, bit == 1);
                }
                None => {
                    if let Some(bit) = self.symbols.bit_of(y) {
                        marked_mask.set(i, true);
                        marked_bits.set(i, bit == 1);
                    }
                }
            }
        }
        let Some(set) = self.code.consistent_messages(&plain_positions, &targets) else {
            return LinearOutcome::Bot;
        };
        let mut accepted: Option<BitVec> = None;
        let mut multiple = false;
        let visited = set.for_each_bounded(self.max_enumeration_dim, |message| {
            if multiple {
                return;
            }
            let word = self.code.encode(message);
            let disagreement = word.masked_distance(&marked_bits, &marked_mask);
            if (disagreement as f64) < self.delta * n as f64 {
                match &accepted {
                    Some(prev) if prev != message => multiple = true,
                    Some(_) => {}
                    None => accepted = Some(message.clone()),
                }
            }
        });
        if !visited {
            self.dim_overflows.fetch_add(1, Ordering::Relaxed);
            return LinearOutcome::Bot;
        }
        if multiple {
            return LinearOutcome::Bot;
        }
        accepted.map_or(LinearOutcome::Bot, LinearOutcome::Message)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::make_two_step_bec;
    use crate::coding::constant_type_codebook;
    use crate::rng::trial_rng;

    fn two_step_codebook(n: usize, k_rate: f64) -> Codebook {
        let mut rng = trial_rng(100, 0);
        constant_type_codebook(n, k_rate, &[0.5, 0.5], 0.1, &mut rng).unwrap()
    }

    /// Encodes a binary codeword as a received word with no erasures.
    fn plain_received(word: &[usize]) -> Vec<usize> {
        word.to_vec() // plain symbols are indices 0 and 1
    }

    #[test]
    fn erasure_decoder_accepts_clean_transmission() {
        let cb = two_step_codebook(16, 0.25);
        let dec = ErasureSchemeDecoder::new(
            &cb,
            ErasureSymbols::two_step(),
            DecoderConfig::new(0.2, 0.05).unwrap(),
        );
        for m in 0..cb.k() {
            let received = plain_received(cb.word(m));
            assert_eq!(dec.decode(Side::B, &received, None), DecodeOutcome::Message(m));
        }
    }

    #[test]
    fn erasure_decoder_rejects_single_plain_flip() {
        // A flipped unerased position fails the common-consistency condition
        // for the true message and every other message stays far away.
        let cb = two_step_codebook(16, 0.25);
        let dec = ErasureSchemeDecoder::new(
            &cb,
            ErasureSymbols::two_step(),
            DecoderConfig::new(0.2, 0.05).unwrap(),
        );
        let mut received = plain_received(cb.word(0));
        received[3] = 1 - received[3];
        assert_eq!(dec.decode(Side::B, &received, None), DecodeOutcome::Bot);
    }

    #[test]
    fn erasure_decoder_fully_erased_output_is_bot() {
        let cb = two_step_codebook(16, 0.25);
        let dec = ErasureSchemeDecoder::new(
            &cb,
            ErasureSymbols::two_step(),
            DecoderConfig::new(0.2, 0.05).unwrap(),
        );
        let received = alloc::vec![4usize; 16]; // all "e"
        assert_eq!(dec.decode(Side::B, &received, None), DecodeOutcome::Bot);
    }

    #[test]
    fn erasure_decoder_tolerates_marked_noise_within_delta() {
        let cb = two_step_codebook(16, 0.25);
        let dec = ErasureSchemeDecoder::new(
            &cb,
            ErasureSymbols::two_step(),
            DecoderConfig::new(0.2, 0.05).unwrap(),
        );
        // One marked mismatch: tilde of the flipped bit at one position.
        let mut received = plain_received(cb.word(1));
        received[0] = 2 + (1 - cb.word(1)[0]); // tilde symbol of the flip
        assert_eq!(dec.decode(Side::B, &received, None), DecodeOutcome::Message(1));
    }

    #[test]
    fn explain_only_decoder_accepts_exact_and_rejects_flip() {
        let cb = two_step_codebook(16, 0.25);
        let dec = ExplainOnlyDecoder::new(&cb, ErasureSymbols::two_step());
        let received = plain_received(cb.word(2));
        assert_eq!(dec.decode(Side::B, &received, None), DecodeOutcome::Message(2));
        let mut flipped = received.clone();
        flipped[5] = 1 - flipped[5];
        assert_eq!(dec.decode(Side::B, &flipped, None), DecodeOutcome::Bot);
        // The flip hidden behind an erasure is accepted.
        let mut erased = received;
        erased[5] = 4;
        assert_eq!(dec.decode(Side::B, &erased, None), DecodeOutcome::Message(2));
    }

    #[test]
    fn greedy_explaining_vector_is_optimal() {
        // Brute-force all explaining words at n <= 10 and compare the
        // minimal disagreement with the greedy count.
        let cb = two_step_codebook(8, 0.25);
        let symbols = ErasureSymbols::two_step();
        let dec =
            ErasureSchemeDecoder::new(&cb, symbols, DecoderConfig::new(0.3, 0.05).unwrap());
        let mut rng = trial_rng(101, 0);
        for _ in 0..200 {
            let received: Vec<usize> =
                (0..8).map(|_| crate::rng::uniform_usize(&mut rng, 5)).collect();
            for m in 0..cb.k() {
                let word = cb.word(m);
                let greedy = dec.min_disagreement(word, &received);
                // Brute force over all explaining words.
                let mut best = usize::MAX;
                for cand in 0u32..(1 << 8) {
                    let x: Vec<usize> = (0..8).map(|i| ((cand >> i) & 1) as usize).collect();
                    let explains = x.iter().zip(&received).all(|(&xi, &y)| {
                        symbols.is_erase(y)
                            || matches!(symbols.bit_of(y), Some(b) if b == xi)
                    });
                    if explains {
                        best = best.min(crate::coding::hamming(&x, word));
                    }
                }
                assert_eq!(greedy, best, "m={m} received={received:?}");
            }
        }
    }

    #[test]
    fn window_selection_matches_bounds() {
        // n delta / 8 < 2^l <= n delta / 4.
        let ell = choose_ell(512, 0.0625).unwrap();
        assert_eq!(ell, 3);
        let ell = choose_ell(64, 0.0625).unwrap();
        assert_eq!(ell, 0);
        assert!(matches!(
            choose_ell(16, 0.01),
            Err(DecodingError::WindowEmpty { .. })
        ));
    }

    #[test]
    fn h_index_spans_the_window() {
        let zeros = BitVec::zeros(16);
        assert_eq!(h_index(&zeros, 3).unwrap(), 1);
        let ones = BitVec::from_bits(&[1; 16].map(|b: i32| b as usize));
        assert_eq!(h_index(&ones, 3).unwrap(), 8);
        assert!(h_index(&zeros, 32).is_err());
    }

    #[test]
    fn h_index_is_uniform_on_uniform_bits() {
        // Chi-squared test over [1:8] with 1e5 samples; the 99.9% quantile
        // for 7 degrees of freedom is 24.32.
        let mut rng = trial_rng(102, 0);
        let mut counts = [0u64; 8];
        let samples = 100_000;
        for _ in 0..samples {
            let s = BitVec::random(16, &mut rng);
            counts[h_index(&s, 3).unwrap() - 1] += 1;
        }
        let expected = samples as f64 / 8.0;
        let chi2: f64 =
            counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        assert!(chi2 < 24.32, "chi2 = {chi2}, counts = {counts:?}");
    }

    #[test]
    fn shared_rand_decoder_monotone_in_threshold() {
        // The per-message accept set only grows with the threshold: a unique
        // decode at t can only stay on the same message or collapse to Bot
        // (never switch message) at t + 1.
        let mut rng = trial_rng(103, 0);
        let cb = crate::coding::gv_codebook_with_count(24, 4, 10, 50, &mut rng).unwrap();
        let dec = SharedRandDecoder::new(&cb, ErasureSymbols::bec_pair(), 2);
        for trial in 0..300 {
            let mut trng = trial_rng(104, trial);
            let received: Vec<usize> =
                (0..24).map(|_| crate::rng::uniform_usize(&mut trng, 3)).collect();
            for t in 0..8 {
                if let DecodeOutcome::Message(m) = dec.decode_with_threshold(&received, t) {
                    let next = dec.decode_with_threshold(&received, t + 1);
                    assert!(
                        next == DecodeOutcome::Message(m) || next == DecodeOutcome::Bot,
                        "outcome switched message between thresholds"
                    );
                }
            }
        }
    }

    #[test]
    fn shared_rand_decoder_accepts_clean_word() {
        let mut rng = trial_rng(105, 0);
        let cb = crate::coding::gv_codebook_with_count(24, 4, 10, 50, &mut rng).unwrap();
        let dec = SharedRandDecoder::new(&cb, ErasureSymbols::bec_pair(), 2);
        let shared = BitVec::zeros(24); // threshold 1
        for m in 0..cb.k() {
            let received = cb.word(m).to_vec();
            assert_eq!(
                dec.decode(Side::B, &received, Some(&shared)),
                DecodeOutcome::Message(m)
            );
        }
    }

    #[test]
    fn linear_decoder_matches_explicit_decoder() {
        // Materialize a small linear code as an explicit codebook and check
        // the two decoders agree on random outputs.
        let mut rng = trial_rng(106, 0);
        let code = LinearCode::random(24, 6, &mut rng);
        let words: Vec<Vec<usize>> = (0u64..64)
            .map(|m| {
                let mut msg = BitVec::zeros(6);
                for b in 0..6 {
                    msg.set(b, (m >> b) & 1 == 1);
                }
                code.encode(&msg).to_bits()
            })
            .collect();
        // Distance 0 declared: we only compare decoders, not code quality.
        let cb = Codebook::from_words(2, words.clone(), 0, None).unwrap();
        let config = DecoderConfig::new(0.15, 0.05).unwrap();
        let explicit =
            ErasureSchemeDecoder::new(&cb, ErasureSymbols::two_step(), config);
        let lazy = LinearErasureDecoder::new(code, ErasureSymbols::two_step(), config);
        let ch = make_two_step_bec(0.5, 0.5).unwrap();
        let sampler = crate::channel::ChannelSampler::new(&ch);
        for trial in 0..500 {
            let mut trng = trial_rng(107, trial);
            // Random input word, not necessarily a codeword.
            let x: Vec<usize> = (0..24).map(|_| crate::rng::uniform_usize(&mut trng, 2)).collect();
            let (y, _) = sampler.sample_word(&x, &mut trng);
            let explicit_out = explicit.decode(Side::B, &y, None);
            let lazy_out = lazy.decode_linear(&y);
            match (explicit_out, lazy_out) {
                (DecodeOutcome::Bot, LinearOutcome::Bot) => {}
                (DecodeOutcome::Message(m), LinearOutcome::Message(msg)) => {
                    assert_eq!(words[m], code_word_bits(&lazy, &msg));
                }
                other => panic!("decoders disagree: {other:?}"),
            }
        }
    }

    fn code_word_bits(dec: &LinearErasureDecoder, msg: &BitVec) -> Vec<usize> {
        dec.code().encode(msg).to_bits()
    }
}
