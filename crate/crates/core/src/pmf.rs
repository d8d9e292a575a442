//! Probability vectors over a declared finite alphabet.

use alloc::vec::Vec;
use core::fmt;

use crate::math;

/// Tolerance for "sums to one" checks on probability vectors.
pub const MASS_TOL: f64 = 1e-12;

/// A probability mass function over an indexed alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf(Vec<f64>);

/// Validation failure for a probability vector.
#[derive(Debug, Clone, PartialEq)]
pub enum PmfError {
    NegativeEntry { index: usize, value: f64 },
    MassMismatch { sum: f64 },
    Empty,
}

impl fmt::Display for PmfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PmfError::NegativeEntry { index, value } => {
                write!(f, "negative probability {value} at index {index}")
            }
            PmfError::MassMismatch { sum } => write!(f, "probabilities sum to {sum}, not 1"),
            PmfError::Empty => write!(f, "empty probability vector"),
        }
    }
}

impl core::error::Error for PmfError {}

impl Pmf {
    /// Validates entries in `[0,1]` summing to 1 within [`MASS_TOL`].
    pub fn new(p: Vec<f64>) -> Result<Self, PmfError> {
        if p.is_empty() {
            return Err(PmfError::Empty);
        }
        for (i, &v) in p.iter().enumerate() {
            if v < 0.0 || !v.is_finite() {
                return Err(PmfError::NegativeEntry { index: i, value: v });
            }
        }
        let sum: f64 = p.iter().sum();
        if math::abs(sum - 1.0) > MASS_TOL {
            return Err(PmfError::MassMismatch { sum });
        }
        Ok(Pmf(p))
    }

    /// Uniform distribution on `n` symbols.
    pub fn uniform(n: usize) -> Self {
        assert!(n > 0);
        Pmf(alloc::vec![1.0 / n as f64; n])
    }

    /// Point mass at `index`.
    pub fn point(n: usize, index: usize) -> Self {
        assert!(index < n);
        let mut p = alloc::vec![0.0; n];
        p[index] = 1.0;
        Pmf(p)
    }

    /// Normalizes a non-negative weight vector. Panics on zero total mass.
    pub fn normalized(mut w: Vec<f64>) -> Self {
        let sum: f64 = w.iter().sum();
        assert!(sum > 0.0, "cannot normalize zero mass");
        for v in &mut w {
            *v /= sum;
        }
        Pmf(w)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn entropy(&self) -> f64 {
        math::entropy(&self.0)
    }

    /// Samples an index using one uniform draw in `[0,1)`.
    pub fn sample_with(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (i, &p) in self.0.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        self.0.len() - 1
    }
}

impl core::ops::Index<usize> for Pmf {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}
