//! Float helpers usable without `std`.
//!
//! All information quantities in this crate are in bits (log base 2).

/// Natural log wrapper.
#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

/// Base-2 log wrapper.
#[inline]
pub fn log2(x: f64) -> f64 {
    libm::log2(x)
}

/// `2^x`.
#[inline]
pub fn exp2(x: f64) -> f64 {
    libm::exp2(x)
}

/// `e^x`.
#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn powi(x: f64, n: i32) -> f64 {
    libm::pow(x, n as f64)
}

/// `x * log2(x)` with the convention `0 log 0 = 0`.
#[inline]
pub fn xlog2(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * log2(x)
    }
}

/// `x * log2(x/y)` with the conventions `0 log(0/y) = 0` and
/// `x log(x/0) = +inf` for `x > 0`.
#[inline]
pub fn xlog2_ratio(x: f64, y: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if y <= 0.0 {
        f64::INFINITY
    } else {
        x * log2(x / y)
    }
}

/// Binary entropy in bits; `h2(0) = h2(1) = 0`.
pub fn h2(p: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p));
    -xlog2(p) - xlog2(1.0 - p)
}

/// Shannon entropy of a probability vector, in bits.
pub fn entropy(p: &[f64]) -> f64 {
    -p.iter().copied().map(xlog2).sum::<f64>()
}

/// KL divergence `D(p || q)` in bits; `+inf` when `p` puts mass where `q` has none.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    p.iter().zip(q).map(|(&a, &b)| xlog2_ratio(a, b)).sum()
}

/// L1 distance between two equal-length vectors.
pub fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| abs(x - y)).sum()
}
