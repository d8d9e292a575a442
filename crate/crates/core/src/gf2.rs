//! Bit-packed GF(2) linear algebra and random binary linear codes.
//!
//! Explicit codebooks stop being materializable around a million words, but
//! the honest-transmission experiments need true-rate encoders (`2^{nR}`
//! messages). A random `k x n` generator matrix provides one: encoding is a
//! vector-matrix product and the set of codewords consistent with a partial
//! observation is an affine subspace recoverable by elimination, so decoders
//! can search it without enumerating the code.

use alloc::vec::Vec;

use rand_core::RngCore;

/// A packed bit vector of fixed length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitVec {
    blocks: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { blocks: alloc::vec![0; len.div_ceil(64)], len }
    }

    pub fn random(len: usize, rng: &mut impl RngCore) -> Self {
        let mut v = BitVec::zeros(len);
        for b in v.blocks.iter_mut() {
            *b = rng.next_u64();
        }
        v.mask_tail();
        v
    }

    pub fn from_bits(bits: &[usize]) -> Self {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                v.set(i, true);
            }
        }
        v
    }

    fn mask_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.blocks.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.blocks[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        if value {
            self.blocks[i / 64] |= 1 << (i % 64);
        } else {
            self.blocks[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a ^= b;
        }
    }

    pub fn weight(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    /// Hamming distance restricted to positions in `mask`.
    pub fn masked_distance(&self, other: &BitVec, mask: &BitVec) -> usize {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .zip(&mask.blocks)
            .map(|((a, b), m)| ((a ^ b) & m).count_ones() as usize)
            .sum()
    }

    pub fn to_bits(&self) -> Vec<usize> {
        (0..self.len).map(|i| usize::from(self.get(i))).collect()
    }

    /// Raw 64-bit blocks, least-significant bit first.
    pub fn blocks(&self) -> &[u64] {
        &self.blocks
    }
}

/// A binary linear code given by a `k x n` generator matrix.
#[derive(Debug, Clone)]
pub struct LinearCode {
    /// Generator rows, one BitVec of length n per message bit.
    rows: Vec<BitVec>,
    /// Transposed view: column `pos` as a BitVec over the message bits,
    /// precomputed because decoders build one equation per output position.
    cols: Vec<BitVec>,
    n: usize,
}

impl LinearCode {
    /// Uniformly random generator matrix.
    pub fn random(n: usize, k: usize, rng: &mut impl RngCore) -> Self {
        assert!(k <= n);
        let rows: Vec<BitVec> = (0..k).map(|_| BitVec::random(n, rng)).collect();
        let cols = (0..n)
            .map(|pos| {
                let mut col = BitVec::zeros(k);
                for (i, row) in rows.iter().enumerate() {
                    if row.get(pos) {
                        col.set(i, true);
                    }
                }
                col
            })
            .collect();
        LinearCode { rows, cols, n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n as f64
    }

    /// Codeword for a message given as `k` bits.
    pub fn encode(&self, message: &BitVec) -> BitVec {
        debug_assert_eq!(message.len(), self.k());
        let mut word = BitVec::zeros(self.n);
        for (i, row) in self.rows.iter().enumerate() {
            if message.get(i) {
                word.xor_assign(row);
            }
        }
        word
    }

    /// Minimum weight over all nonzero codewords by Gray-code enumeration.
    /// Cost is `2^k`; callers must keep `k` small.
    pub fn min_distance_exhaustive(&self) -> usize {
        assert!(self.k() < 28, "exhaustive distance check limited to small k");
        let mut word = BitVec::zeros(self.n);
        let mut best = usize::MAX;
        let total = 1u64 << self.k();
        for i in 1..total {
            // Gray code: flip the row indexed by the lowest set bit of i.
            let flip = i.trailing_zeros() as usize;
            word.xor_assign(&self.rows[flip]);
            let w = word.weight();
            if w > 0 {
                best = best.min(w);
            }
        }
        best
    }

    /// Lower-bounds the minimum distance by sampling `samples` random
    /// nonzero messages. Returns the smallest weight observed.
    pub fn min_distance_sampled(&self, samples: usize, rng: &mut impl RngCore) -> usize {
        let mut best = usize::MAX;
        for _ in 0..samples {
            let mut m = BitVec::random(self.k(), rng);
            if m.weight() == 0 {
                m.set(0, true);
            }
            best = best.min(self.encode(&m).weight());
        }
        best
    }

    /// Solves `G^T m = b` on the given positions: returns messages whose
    /// codewords agree with `targets` at every index in `positions`.
    ///
    /// The solution set is an affine subspace; it is returned as a particular
    /// solution plus a basis of the homogeneous kernel, or `None` when the
    /// system is inconsistent. Message lengths up to 128 bits are supported
    /// so equations fit in two machine words.
    pub fn consistent_messages(
        &self,
        positions: &[usize],
        targets: &BitVec,
    ) -> Option<AffineMessageSet> {
        let k = self.k();
        assert!(k <= 128, "message length limited to 128 bits");
        // Incremental reduced elimination: pivots[col] holds a reduced
        // equation whose leading set bit is col.
        let mut pivots: [Option<Eq2>; 128] = [None; 128];
        for &pos in positions {
            let blocks = self.cols[pos].blocks();
            let mut eq = Eq2 {
                lo: blocks[0],
                hi: if blocks.len() > 1 { blocks[1] } else { 0 },
                rhs: targets.get(pos),
            };
            loop {
                let Some(col) = eq.leading_bit() else {
                    if eq.rhs {
                        return None; // 0 = 1
                    }
                    break;
                };
                match &pivots[col] {
                    Some(p) => eq.xor(p),
                    None => {
                        pivots[col] = Some(eq);
                        break;
                    }
                }
            }
        }
        // Back-substitute so every pivot row has zeros on other pivot cols.
        for col in (0..k).rev() {
            let Some(p) = pivots[col] else { continue };
            for other in 0..col {
                if let Some(o) = &mut pivots[other] {
                    if o.get(col) {
                        o.xor(&p);
                        // Keep the leading bit intact: col > other, so the
                        // pivot bit at `other` is untouched.
                    }
                }
            }
        }
        // Particular solution: free variables at zero.
        let mut particular = BitVec::zeros(k);
        for col in 0..k {
            if let Some(p) = &pivots[col] {
                if p.rhs {
                    particular.set(col, true);
                }
            }
        }
        // Kernel basis: one vector per free column.
        let mut kernel = Vec::new();
        for free in 0..k {
            if pivots[free].is_some() {
                continue;
            }
            let mut v = BitVec::zeros(k);
            v.set(free, true);
            for col in 0..k {
                if let Some(p) = &pivots[col] {
                    if p.get(free) {
                        v.set(col, true);
                    }
                }
            }
            kernel.push(v);
        }
        Some(AffineMessageSet { particular, kernel })
    }
}

/// A reduced equation over up to 128 message bits.
#[derive(Debug, Clone, Copy)]
struct Eq2 {
    lo: u64,
    hi: u64,
    rhs: bool,
}

impl Eq2 {
    #[inline]
    fn leading_bit(&self) -> Option<usize> {
        if self.lo != 0 {
            Some(self.lo.trailing_zeros() as usize)
        } else if self.hi != 0 {
            Some(64 + self.hi.trailing_zeros() as usize)
        } else {
            None
        }
    }

    #[inline]
    fn get(&self, col: usize) -> bool {
        if col < 64 {
            (self.lo >> col) & 1 == 1
        } else {
            (self.hi >> (col - 64)) & 1 == 1
        }
    }

    #[inline]
    fn xor(&mut self, other: &Eq2) {
        self.lo ^= other.lo;
        self.hi ^= other.hi;
        self.rhs ^= other.rhs;
    }
}

/// Messages of the form `particular + span(kernel)`.
#[derive(Debug, Clone)]
pub struct AffineMessageSet {
    pub particular: BitVec,
    pub kernel: Vec<BitVec>,
}

impl AffineMessageSet {
    pub fn dimension(&self) -> usize {
        self.kernel.len()
    }

    /// Visits every message in the set (cost `2^dimension`); returns false
    /// without visiting anything if the dimension exceeds `max_dim`.
    pub fn for_each_bounded(&self, max_dim: usize, mut f: impl FnMut(&BitVec)) -> bool {
        if self.dimension() > max_dim {
            return false;
        }
        let mut current = self.particular.clone();
        f(&current);
        let total = 1u64 << self.dimension();
        for i in 1..total {
            let flip = i.trailing_zeros() as usize;
            current.xor_assign(&self.kernel[flip]);
            f(&current);
        }
        true
    }
}
