//! Log-space combinatorial factors.
//!
//! Every binomial-weighted prefactor is assembled as a logarithm and
//! exponentiated once, so values stay finite for the largest registers the
//! experiments use (C(4n, 2n) at n = 60, C(n, n/2) at n = 128).

use std::f64::consts::LN_2;

use statrs::function::factorial::ln_binomial;

/// `ln C(n, k)`.
pub fn ln_choose(n: usize, k: usize) -> f64 {
    ln_binomial(n as u64, k as u64)
}

/// `C(n, k)` evaluated through its logarithm.
pub fn choose(n: usize, k: usize) -> f64 {
    ln_choose(n, k).exp()
}

/// `C(2m, m) / 4^m` as the product of `(2k - 1) / (2k)`, exact for small `m`.
pub fn central_binomial_ratio(m: usize) -> f64 {
    (1..=m).map(|k| (2 * k - 1) as f64 / (2 * k) as f64).product()
}

/// `C(n, n/2) / 2^n`, the squared overlap of the zero-weight J_y eigenvector
/// with `|0...0>`.
pub fn central_weight(n: usize) -> f64 {
    (ln_choose(n, n / 2) - n as f64 * LN_2).exp()
}

/// `C(n, n/2) / 2^(2n-1)`, the O(gamma^2) prefactor of the slow Grover cost.
pub fn slow_grover_prefactor(n: usize) -> f64 {
    (ln_choose(n, n / 2) - (2.0 * n as f64 - 1.0) * LN_2).exp()
}
