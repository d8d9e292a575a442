//! Joint types: exact empirical distributions of tuples of sequences.
//!
//! Counts are kept as integers so that divergence computations downstream
//! see exact multiples of `1/n` rather than accumulated float error.

use alloc::vec::Vec;
use core::fmt;

use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub enum TypeError {
    LengthMismatch { first: usize, other: usize },
    Empty,
    SymbolOutOfRange { axis: usize, symbol: usize, dim: usize },
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeError::LengthMismatch { first, other } => {
                write!(f, "sequence lengths differ: {first} vs {other}")
            }
            TypeError::Empty => write!(f, "cannot take the type of empty sequences"),
            TypeError::SymbolOutOfRange { axis, symbol, dim } => {
                write!(f, "symbol {symbol} on axis {axis} exceeds alphabet size {dim}")
            }
        }
    }
}

impl core::error::Error for TypeError {}

/// Empirical joint distribution of equal-length index sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct JointType {
    dims: Vec<usize>,
    counts: Vec<u64>,
    n: usize,
}

impl JointType {
    /// Exact joint type of the given sequences over alphabets of size `dims[i]`.
    pub fn from_seqs(seqs: &[&[usize]], dims: &[usize]) -> Result<Self, TypeError> {
        assert_eq!(seqs.len(), dims.len());
        let n = seqs.first().map_or(0, |s| s.len());
        if n == 0 {
            return Err(TypeError::Empty);
        }
        for s in seqs {
            if s.len() != n {
                return Err(TypeError::LengthMismatch { first: n, other: s.len() });
            }
        }
        let size = dims.iter().product();
        let mut counts = alloc::vec![0u64; size];
        for i in 0..n {
            let mut idx = 0;
            for (axis, s) in seqs.iter().enumerate() {
                let sym = s[i];
                if sym >= dims[axis] {
                    return Err(TypeError::SymbolOutOfRange { axis, symbol: sym, dim: dims[axis] });
                }
                idx = idx * dims[axis] + sym;
            }
            counts[idx] += 1;
        }
        Ok(JointType { dims: dims.to_vec(), counts, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dims.len());
        let mut flat = 0;
        for (axis, &i) in idx.iter().enumerate() {
            flat = flat * self.dims[axis] + i;
        }
        flat
    }

    pub fn count(&self, idx: &[usize]) -> u64 {
        self.counts[self.flat_index(idx)]
    }

    pub fn prob(&self, idx: &[usize]) -> f64 {
        self.count(idx) as f64 / self.n as f64
    }

    /// Marginal type over the given axes (in the given order).
    pub fn marginal(&self, keep: &[usize]) -> JointType {
        let dims: Vec<usize> = keep.iter().map(|&a| self.dims[a]).collect();
        let size = dims.iter().product();
        let mut counts = alloc::vec![0u64; size];
        let mut idx = alloc::vec![0usize; self.dims.len()];
        for (flat, &c) in self.counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            // Unflatten.
            let mut rem = flat;
            for axis in (0..self.dims.len()).rev() {
                idx[axis] = rem % self.dims[axis];
                rem /= self.dims[axis];
            }
            let mut out = 0;
            for (pos, &a) in keep.iter().enumerate() {
                out = out * dims[pos] + idx[a];
            }
            counts[out] += c;
        }
        JointType { dims, counts, n: self.n }
    }

    /// Probability table flattened in row-major axis order.
    pub fn to_probs(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.n as f64).collect()
    }

    /// Entropy of the joint type in bits.
    pub fn entropy(&self) -> f64 {
        let n = self.n as f64;
        math::log2(n)
            - self
                .counts
                .iter()
                .filter(|&&c| c > 0)
                .map(|&c| (c as f64) * math::log2(c as f64))
                .sum::<f64>()
                / n
    }
}

/// Joint type of a pair, as a `da x db` probability table.
pub fn pair_type(a: &[usize], b: &[usize], da: usize, db: usize) -> Result<JointType, TypeError> {
    JointType::from_seqs(&[a, b], &[da, db])
}

/// `D(P_AB || P_A W)` in bits, where `joint` is a two-axis type and `w` maps
/// each `a` to a row over the second axis.
///
/// Infinite when the type puts mass on a pair with `w(b|a) = 0`.
pub fn kl_vs_channel(joint: &JointType, w: impl Fn(usize, usize) -> f64) -> f64 {
    assert_eq!(joint.dims().len(), 2);
    let (da, db) = (joint.dims()[0], joint.dims()[1]);
    let pa = joint.marginal(&[0]);
    let mut d = 0.0;
    for a in 0..da {
        let pa_a = pa.prob(&[a]);
        for b in 0..db {
            let p = joint.prob(&[a, b]);
            d += math::xlog2_ratio(p, pa_a * w(a, b));
        }
    }
    d
}

/// Conditional KL `D(P_ABC || P_AB W)` in bits for a three-axis type, where
/// `w` maps the second axis to a row over the third: the model is
/// `P(a,b) w(c|b)`.
pub fn kl_vs_channel_cond(joint: &JointType, w: impl Fn(usize, usize) -> f64) -> f64 {
    assert_eq!(joint.dims().len(), 3);
    let (da, db, dc) = (joint.dims()[0], joint.dims()[1], joint.dims()[2]);
    let pab = joint.marginal(&[0, 1]);
    let mut d = 0.0;
    for a in 0..da {
        for b in 0..db {
            let pab_v = pab.prob(&[a, b]);
            for c in 0..dc {
                let p = joint.prob(&[a, b, c]);
                d += math::xlog2_ratio(p, pab_v * w(b, c));
            }
        }
    }
    d
}

/// Mutual information between the two axes of a pair type, in bits.
pub fn pair_mutual_information(joint: &JointType) -> f64 {
    assert_eq!(joint.dims().len(), 2);
    joint.marginal(&[0]).entropy() + joint.marginal(&[1]).entropy() - joint.entropy()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> Vec<usize> {
        s.bytes().map(|b| (b - b'0') as usize).collect()
    }

    #[test]
    fn pair_type_of_matched_bits() {
        let t = pair_type(&seq("01"), &seq("01"), 2, 2).unwrap();
        assert_eq!(t.prob(&[0, 0]), 0.5);
        assert_eq!(t.prob(&[1, 1]), 0.5);
        assert_eq!(t.prob(&[0, 1]), 0.0);
    }

    #[test]
    fn pair_type_of_half_matched_bits() {
        let t = pair_type(&seq("00"), &seq("01"), 2, 2).unwrap();
        assert_eq!(t.prob(&[0, 0]), 0.5);
        assert_eq!(t.prob(&[0, 1]), 0.5);
    }

    #[test]
    fn length_mismatch_reported() {
        assert!(matches!(
            pair_type(&seq("00"), &seq("011"), 2, 2),
            Err(TypeError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn marginals_are_consistent() {
        let a = seq("0010211");
        let b = seq("1102001");
        let c = seq("0000111");
        let t = JointType::from_seqs(&[&a, &b, &c], &[3, 3, 2]).unwrap();
        let tab = t.marginal(&[0, 1]);
        let ta = t.marginal(&[0]);
        for i in 0..3 {
            let direct: u64 = (0..3).map(|j| tab.count(&[i, j])).sum();
            assert_eq!(direct, ta.count(&[i]));
        }
        // Probabilities sum to one up to rounding in the 1/n division.
        assert!((t.to_probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kl_vs_channel_zero_for_exact_fit() {
        // Type (0,0),(0,1),(1,0),(1,1) equally often matches the uniform channel.
        let a = seq("0011");
        let b = seq("0101");
        let t = pair_type(&a, &b, 2, 2).unwrap();
        assert!(kl_vs_channel(&t, |_, _| 0.5).abs() < 1e-12);
        // And is infinite against a deterministic channel it contradicts.
        assert!(kl_vs_channel(&t, |x, y| if x == y { 1.0 } else { 0.0 }).is_infinite());
    }

    #[test]
    fn mutual_information_of_identical_sequences() {
        let a = seq("00110101");
        let t = pair_type(&a, &a, 2, 2).unwrap();
        assert!((pair_mutual_information(&t) - 1.0).abs() < 1e-12);
    }
}
