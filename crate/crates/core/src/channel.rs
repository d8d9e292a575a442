//! Finite memoryless broadcast channels `W(y,z|x)` and their marginals.
//!
//! Symbols are labeled strings so constructed channels render with their
//! conventional symbol names; the canonical index order of an alphabet is
//! its declaration order and is preserved by serialization.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand_core::RngCore;

use crate::math;
use crate::rng::uniform_f64;

/// Row-sum tolerance for stochasticity checks.
pub const ROW_TOL: f64 = 1e-12;

/// An ordered list of distinct symbol labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self, ChannelError> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(ChannelError::EmptyAlphabet);
        }
        for i in 0..symbols.len() {
            for j in i + 1..symbols.len() {
                if symbols[i] == symbols[j] {
                    return Err(ChannelError::DuplicateSymbol(symbols[i].clone()));
                }
            }
        }
        Ok(Alphabet { symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, i: usize) -> &str {
        &self.symbols[i]
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == symbol)
    }
}

/// Errors from channel construction and validation.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelError {
    EmptyAlphabet,
    DuplicateSymbol(String),
    DimensionMismatch { expected: usize, got: usize },
    NegativeEntry { x: String, y: String, z: String, value: f64 },
    NonStochastic { x: String, deviation: f64 },
    UnreachableOutputSymbol { receiver: char, symbol: String },
    BadParameter(&'static str),
}

impl fmt::Display for ChannelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelError::EmptyAlphabet => write!(f, "alphabet must be non-empty"),
            ChannelError::DuplicateSymbol(s) => write!(f, "duplicate symbol {s:?}"),
            ChannelError::DimensionMismatch { expected, got } => {
                write!(f, "tensor has {got} entries, expected {expected}")
            }
            ChannelError::NegativeEntry { x, y, z, value } => {
                write!(f, "negative probability {value} at ({x},{y},{z})")
            }
            ChannelError::NonStochastic { x, deviation } => {
                write!(f, "row for input {x:?} deviates from unit mass by {deviation:e}")
            }
            ChannelError::UnreachableOutputSymbol { receiver, symbol } => {
                write!(f, "output symbol {symbol:?} of receiver {receiver} is unreachable")
            }
            ChannelError::BadParameter(what) => write!(f, "parameter out of range: {what}"),
        }
    }
}

impl core::error::Error for ChannelError {}

/// Which receiver an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Receiver {
    Y,
    Z,
}

/// The stochastic tensor `W(y,z|x)` over finite alphabets.
///
/// Immutable after construction; shareable across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct BroadcastChannel {
    x_alphabet: Alphabet,
    y_alphabet: Alphabet,
    z_alphabet: Alphabet,
    /// Flattened tensor, index `(x * |Y| + y) * |Z| + z`.
    w: Vec<f64>,
}

impl BroadcastChannel {
    /// Validates dimensions, non-negativity and per-input unit mass.
    ///
    /// Unreachable output symbols do not fail construction; they are reported
    /// by [`BroadcastChannel::validate_strict`] and can be removed with
    /// [`BroadcastChannel::prune_unreachable`].
    pub fn new(
        x_alphabet: Alphabet,
        y_alphabet: Alphabet,
        z_alphabet: Alphabet,
        w: Vec<f64>,
    ) -> Result<Self, ChannelError> {
        let expected = x_alphabet.len() * y_alphabet.len() * z_alphabet.len();
        if w.len() != expected {
            return Err(ChannelError::DimensionMismatch { expected, got: w.len() });
        }
        let (ny, nz) = (y_alphabet.len(), z_alphabet.len());
        for x in 0..x_alphabet.len() {
            let mut sum = 0.0;
            for y in 0..ny {
                for z in 0..nz {
                    let v = w[(x * ny + y) * nz + z];
                    if v < 0.0 || !v.is_finite() {
                        return Err(ChannelError::NegativeEntry {
                            x: x_alphabet.symbol(x).to_string(),
                            y: y_alphabet.symbol(y).to_string(),
                            z: z_alphabet.symbol(z).to_string(),
                            value: v,
                        });
                    }
                    sum += v;
                }
            }
            let deviation = math::abs(sum - 1.0);
            if deviation > ROW_TOL {
                return Err(ChannelError::NonStochastic {
                    x: x_alphabet.symbol(x).to_string(),
                    deviation,
                });
            }
        }
        Ok(BroadcastChannel { x_alphabet, y_alphabet, z_alphabet, w })
    }

    pub fn x_alphabet(&self) -> &Alphabet {
        &self.x_alphabet
    }

    pub fn y_alphabet(&self) -> &Alphabet {
        &self.y_alphabet
    }

    pub fn z_alphabet(&self) -> &Alphabet {
        &self.z_alphabet
    }

    #[inline]
    pub fn prob(&self, x: usize, y: usize, z: usize) -> f64 {
        self.w[(x * self.y_alphabet.len() + y) * self.z_alphabet.len() + z]
    }

    /// Output symbols of the given receiver with zero marginal under every input.
    pub fn unreachable_outputs(&self, receiver: Receiver) -> Vec<usize> {
        let (ny, nz) = (self.y_alphabet.len(), self.z_alphabet.len());
        match receiver {
            Receiver::Y => (0..ny)
                .filter(|&y| {
                    (0..self.x_alphabet.len())
                        .all(|x| (0..nz).all(|z| self.prob(x, y, z) == 0.0))
                })
                .collect(),
            Receiver::Z => (0..nz)
                .filter(|&z| {
                    (0..self.x_alphabet.len())
                        .all(|x| (0..ny).all(|y| self.prob(x, y, z) == 0.0))
                })
                .collect(),
        }
    }

    /// Errors on the first unreachable output symbol, if any.
    pub fn validate_strict(&self) -> Result<(), ChannelError> {
        if let Some(&y) = self.unreachable_outputs(Receiver::Y).first() {
            return Err(ChannelError::UnreachableOutputSymbol {
                receiver: 'Y',
                symbol: self.y_alphabet.symbol(y).to_string(),
            });
        }
        if let Some(&z) = self.unreachable_outputs(Receiver::Z).first() {
            return Err(ChannelError::UnreachableOutputSymbol {
                receiver: 'Z',
                symbol: self.z_alphabet.symbol(z).to_string(),
            });
        }
        Ok(())
    }

    /// Returns a copy with unreachable output symbols removed.
    pub fn prune_unreachable(&self) -> BroadcastChannel {
        let dead_y = self.unreachable_outputs(Receiver::Y);
        let dead_z = self.unreachable_outputs(Receiver::Z);
        if dead_y.is_empty() && dead_z.is_empty() {
            return self.clone();
        }
        let keep_y: Vec<usize> =
            (0..self.y_alphabet.len()).filter(|y| !dead_y.contains(y)).collect();
        let keep_z: Vec<usize> =
            (0..self.z_alphabet.len()).filter(|z| !dead_z.contains(z)).collect();
        let y_alphabet =
            Alphabet::new(keep_y.iter().map(|&y| self.y_alphabet.symbol(y))).expect("non-empty");
        let z_alphabet =
            Alphabet::new(keep_z.iter().map(|&z| self.z_alphabet.symbol(z))).expect("non-empty");
        let mut w = Vec::with_capacity(self.x_alphabet.len() * keep_y.len() * keep_z.len());
        for x in 0..self.x_alphabet.len() {
            for &y in &keep_y {
                for &z in &keep_z {
                    w.push(self.prob(x, y, z));
                }
            }
        }
        BroadcastChannel::new(self.x_alphabet.clone(), y_alphabet, z_alphabet, w)
            .expect("pruning preserves validity")
    }

    /// Marginal point-to-point channel to one receiver.
    pub fn marginal(&self, receiver: Receiver) -> PointToPointChannel {
        let (ny, nz) = (self.y_alphabet.len(), self.z_alphabet.len());
        match receiver {
            Receiver::Y => {
                let mut rows = Vec::with_capacity(self.x_alphabet.len() * ny);
                for x in 0..self.x_alphabet.len() {
                    for y in 0..ny {
                        rows.push((0..nz).map(|z| self.prob(x, y, z)).sum());
                    }
                }
                PointToPointChannel::new(self.x_alphabet.clone(), self.y_alphabet.clone(), rows)
                    .expect("marginal of a valid channel is stochastic")
            }
            Receiver::Z => {
                let mut rows = Vec::with_capacity(self.x_alphabet.len() * nz);
                for x in 0..self.x_alphabet.len() {
                    for z in 0..nz {
                        rows.push((0..ny).map(|y| self.prob(x, y, z)).sum());
                    }
                }
                PointToPointChannel::new(self.x_alphabet.clone(), self.z_alphabet.clone(), rows)
                    .expect("marginal of a valid channel is stochastic")
            }
        }
    }

    /// All `(y, z, prob)` triples with positive probability under input `x`.
    pub fn support_of(&self, x: usize) -> Vec<(usize, usize, f64)> {
        let (ny, nz) = (self.y_alphabet.len(), self.z_alphabet.len());
        let mut out = Vec::new();
        for y in 0..ny {
            for z in 0..nz {
                let p = self.prob(x, y, z);
                if p > 0.0 {
                    out.push((y, z, p));
                }
            }
        }
        out
    }
}

/// A row-stochastic point-to-point channel.
#[derive(Debug, Clone, PartialEq)]
pub struct PointToPointChannel {
    input: Alphabet,
    output: Alphabet,
    /// Flattened rows, index `x * |output| + y`.
    rows: Vec<f64>,
}

impl PointToPointChannel {
    pub fn new(input: Alphabet, output: Alphabet, rows: Vec<f64>) -> Result<Self, ChannelError> {
        let expected = input.len() * output.len();
        if rows.len() != expected {
            return Err(ChannelError::DimensionMismatch { expected, got: rows.len() });
        }
        for x in 0..input.len() {
            let row = &rows[x * output.len()..(x + 1) * output.len()];
            if let Some(v) = row.iter().find(|&&v| v < 0.0 || !v.is_finite()) {
                return Err(ChannelError::NegativeEntry {
                    x: input.symbol(x).to_string(),
                    y: String::new(),
                    z: String::new(),
                    value: *v,
                });
            }
            let deviation = math::abs(row.iter().sum::<f64>() - 1.0);
            if deviation > ROW_TOL {
                return Err(ChannelError::NonStochastic {
                    x: input.symbol(x).to_string(),
                    deviation,
                });
            }
        }
        Ok(PointToPointChannel { input, output, rows })
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    pub fn output(&self) -> &Alphabet {
        &self.output
    }

    #[inline]
    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.rows[x * self.output.len() + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.rows[x * self.output.len()..(x + 1) * self.output.len()]
    }

    /// Column of the transition matrix as a vector over inputs... no:
    /// the distribution column `W(.|x)` viewed as a point in the output simplex.
    pub fn column_of_input(&self, x: usize) -> Vec<f64> {
        self.row(x).to_vec()
    }
}

/// Per-input cumulative tables for fast memoryless sampling.
pub struct ChannelSampler<'a> {
    channel: &'a BroadcastChannel,
    /// Per input: (cumulative probability, y, z).
    tables: Vec<Vec<(f64, usize, usize)>>,
}

impl<'a> ChannelSampler<'a> {
    pub fn new(channel: &'a BroadcastChannel) -> Self {
        let tables = (0..channel.x_alphabet().len())
            .map(|x| {
                let mut acc = 0.0;
                channel
                    .support_of(x)
                    .into_iter()
                    .map(|(y, z, p)| {
                        acc += p;
                        (acc, y, z)
                    })
                    .collect()
            })
            .collect();
        ChannelSampler { channel, tables }
    }

    pub fn channel(&self) -> &BroadcastChannel {
        self.channel
    }

    /// Draws `(y, z)` from `W(.,.|x)`; deterministic given the rng state.
    pub fn sample(&self, x: usize, rng: &mut impl RngCore) -> (usize, usize) {
        let table = &self.tables[x];
        let u = uniform_f64(rng);
        // Linear scan: supports are tiny (<= 25 entries for the built-ins).
        for &(acc, y, z) in table {
            if u < acc {
                return (y, z);
            }
        }
        let &(_, y, z) = table.last().expect("valid rows have support");
        (y, z)
    }

    /// Samples an n-length output pair for the input word `x_word`.
    pub fn sample_word(
        &self,
        x_word: &[usize],
        rng: &mut impl RngCore,
    ) -> (Vec<usize>, Vec<usize>) {
        let mut ys = Vec::with_capacity(x_word.len());
        let mut zs = Vec::with_capacity(x_word.len());
        for &x in x_word {
            let (y, z) = self.sample(x, rng);
            ys.push(y);
            zs.push(z);
        }
        (ys, zs)
    }
}

/// Two-step binary erasure broadcast channel.
///
/// `X = {0,1}`, `Y = Z = {0, 1, 0~, 1~, e}`. With probability `1-p` both
/// receivers get the input unerased; otherwise the input passes through
/// independent erasure channels that erase with probability `q` and mark
/// surviving symbols with `~`.
pub fn make_two_step_bec(p: f64, q: f64) -> Result<BroadcastChannel, ChannelError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ChannelError::BadParameter("p must lie in [0,1]"));
    }
    if !(q > 0.0 && q <= 1.0) {
        return Err(ChannelError::BadParameter("q must lie in (0,1]"));
    }
    let x_alphabet = Alphabet::new(["0", "1"])?;
    let out = Alphabet::new(["0", "1", "0~", "1~", "e"])?;
    let (ny, nz) = (out.len(), out.len());
    let mut w = alloc::vec![0.0; 2 * ny * nz];
    // Output indices: 0,1 plain; 2,3 tilde; 4 erasure.
    for x in 0..2 {
        let tilde = 2 + x;
        // Q(.|x) over {x~, e} within the second step.
        let second = [(tilde, 1.0 - q), (4, q)];
        w[(x * ny + x) * nz + x] = 1.0 - p;
        for (y, qy) in second {
            for (z, qz) in second {
                // Grouped as p * (qy qz) so the tensor is exactly symmetric
                // in (y, z) and the two marginals agree bit-for-bit.
                w[(x * ny + y) * nz + z] = p * (qy * qz);
            }
        }
    }
    BroadcastChannel::new(x_alphabet, out.clone(), out, w)
}

/// Independent binary erasure broadcast channel pair.
///
/// `X = {0,1}`, `Y = Z = {0, 1, e}`; each receiver independently sees the
/// input or an erasure (probability `q`). Its characteristic graph has a
/// single connected component, so no rate is achievable with consensus; it
/// is the base channel of the receiver-shared-randomness scheme.
pub fn make_bec_pair(q: f64) -> Result<BroadcastChannel, ChannelError> {
    if !(q > 0.0 && q < 1.0) {
        return Err(ChannelError::BadParameter("q must lie in (0,1)"));
    }
    let x_alphabet = Alphabet::new(["0", "1"])?;
    let out = Alphabet::new(["0", "1", "e"])?;
    let mut w = alloc::vec![0.0; 2 * 9];
    for x in 0..2 {
        let marg = [(x, 1.0 - q), (2, q)];
        for (y, qy) in marg {
            for (z, qz) in marg {
                w[(x * 3 + y) * 3 + z] = qy * qz;
            }
        }
    }
    BroadcastChannel::new(x_alphabet, out.clone(), out, w)
}

/// Three-input channel whose middle input mixes the two coupled-BSC branches.
///
/// `X = {0, e, 1}`, `Y = Z = {a, b, c, d}`. Inputs 0 and 1 drive a pair of
/// perfectly correlated symmetric branches with crossover `p`; input `e`
/// splits the receivers across the two components with probability 1/2 each.
/// Its common channel is a BSC(`p`) plus a uniformly mixing input.
pub fn make_bsc_mix(p: f64) -> Result<BroadcastChannel, ChannelError> {
    if !(0.0..=0.5).contains(&p) {
        return Err(ChannelError::BadParameter("p must lie in [0,0.5]"));
    }
    let x_alphabet = Alphabet::new(["0", "e", "1"])?;
    let out = Alphabet::new(["a", "b", "c", "d"])?;
    let (a, b, c, d) = (0usize, 1usize, 2usize, 3usize);
    let mut w = alloc::vec![0.0; 3 * 16];
    let mut set = |x: usize, y: usize, z: usize, v: f64| w[(x * 4 + y) * 4 + z] = v;
    set(0, a, a, 1.0 - p);
    set(0, c, c, p);
    set(2, d, d, 1.0 - p);
    set(2, b, b, p);
    set(1, a, b, 0.5);
    set(1, c, d, 0.5);
    BroadcastChannel::new(x_alphabet, out.clone(), out, w)
}

/// Noiseless broadcast channel: both receivers observe the input exactly.
pub fn make_noiseless(symbols: &[&str]) -> Result<BroadcastChannel, ChannelError> {
    let x_alphabet = Alphabet::new(symbols.iter().copied())?;
    let out = Alphabet::new(symbols.iter().copied())?;
    let k = symbols.len();
    let mut w = alloc::vec![0.0; k * k * k];
    for x in 0..k {
        w[(x * k + x) * k + x] = 1.0;
    }
    BroadcastChannel::new(x_alphabet, out.clone(), out, w)
}
