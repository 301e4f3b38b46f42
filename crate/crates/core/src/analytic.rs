//! Closed-form costs, derivatives, variance formulas and gradient bounds.
//!
//! Truncated expressions carry an [`OrderTag`] so callers never mix an
//! O(gamma^2) value with an exact one without noticing.

use std::f64::consts::{LN_2, PI};

use crate::domain::{check_delta, check_even, check_slow_grover};
use crate::error::{Error, Result};
use crate::special::{central_binomial_ratio, ln_choose, slow_grover_prefactor};

/// Below this `|cos(n theta / 4)|` (slow Grover) or `|sin beta|` (ring global
/// cost) the value is taken from the non-singular sum form.
pub const SINGULAR_THRESHOLD: f64 = 1e-8;

/// Derivatives lose two orders of cancellation near the removable
/// singularity, so they switch to the sum form much earlier.
pub const SINGULAR_DERIVATIVE_THRESHOLD: f64 = 1e-3;

/// Base of the logarithm in the purity schedule `delta = log(xi) / (4 xi - 4)`.
pub const PURITY_SCHEDULE_LOG_BASE: f64 = std::f64::consts::E;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderTag {
    Exact,
    OrderGammaSquared,
    OrderGammaLinear,
    AsymptoticInN,
    AsymptoticInL,
}

impl OrderTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            OrderTag::Exact => "exact",
            OrderTag::OrderGammaSquared => "o-gamma2",
            OrderTag::OrderGammaLinear => "o-gamma1",
            OrderTag::AsymptoticInN => "asymptotic-n",
            OrderTag::AsymptoticInL => "asymptotic-l",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormValue {
    pub value: f64,
    pub order: OrderTag,
}

impl ClosedFormValue {
    fn new(value: f64, order: OrderTag) -> Self {
        Self { value, order }
    }
}

// ---------------------------------------------------------------------------
// Separable circuits with a global (or single-qubit local) projector
// ---------------------------------------------------------------------------

/// `1 - cos^(2n)(theta_sum / 2)`.
pub fn cost_separable_pure(theta_sum: f64, n: usize) -> f64 {
    1.0 - (theta_sum / 2.0).cos().powi(2 * n as i32)
}

/// Derivative of [`cost_separable_pure`] with respect to any single angle.
pub fn d_cost_separable_pure(theta_sum: f64, n: usize) -> f64 {
    let (s, c) = (theta_sum / 2.0).sin_cos();
    n as f64 * c.powi(2 * n as i32 - 1) * s
}

/// Input `diag(1 - delta, delta)^(⊗n)`: `1 - (delta + (1 - 2 delta) cos^2(theta_sum / 2))^n`.
pub fn cost_separable_mixed(theta_sum: f64, n: usize, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let c2 = (theta_sum / 2.0).cos().powi(2);
    Ok(1.0 - (delta + (1.0 - 2.0 * delta) * c2).powi(n as i32))
}

pub fn d_cost_separable_mixed(theta_sum: f64, n: usize, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let (s, c) = (theta_sum / 2.0).sin_cos();
    let overlap = delta + (1.0 - 2.0 * delta) * c * c;
    Ok(n as f64 * overlap.powi(n as i32 - 1) * (1.0 - 2.0 * delta) * c * s)
}

/// Averaged single-qubit projector cost; identical for every `n`.
pub fn cost_separable_local(theta_sum: f64) -> f64 {
    1.0 - (theta_sum / 2.0).cos().powi(2)
}

pub fn d_cost_separable_local(theta_sum: f64) -> f64 {
    let (s, c) = (theta_sum / 2.0).sin_cos();
    s * c
}

/// `E[(d C)^2] = n^2 C(4n, 2n) / (2^(4n) (4n - 1))` for the pure separable cost,
/// independent of the number of layers.
pub fn variance_separable_pure(n: usize) -> f64 {
    let nf = n as f64;
    nf * nf * central_binomial_ratio(2 * n) / (4.0 * nf - 1.0)
}

/// Large-`n` form `sqrt(n) / (4 sqrt(2 pi))`.
pub fn variance_separable_pure_asymptotic(n: usize) -> f64 {
    (n as f64).sqrt() / (4.0 * (2.0 * PI).sqrt())
}

// ---------------------------------------------------------------------------
// J_x / J_y collective circuit
// ---------------------------------------------------------------------------

/// Large-`n` fidelity of the alternating J_x/J_y circuit with `|0...0>`.
pub fn cost_jxjy_asymptotic(sum_beta: f64, sum_alpha: f64, n: usize) -> ClosedFormValue {
    let r = sum_beta.hypot(sum_alpha) / (2.0 * (n as f64).sqrt());
    ClosedFormValue::new(r.cos().powi(2 * n as i32), OrderTag::AsymptoticInN)
}

// ---------------------------------------------------------------------------
// xi-separable Haar circuits, m = 1
// ---------------------------------------------------------------------------

/// Residue-theorem value `xi^2 (1 - 2 delta)^(2 xi - 2) / (4 (2 xi - 1))`,
/// i.e. the gradient variance divided by the bounded factor `c^2`.
pub fn variance_xi_separable_m1(xi: usize, delta: f64) -> Result<f64> {
    check_xi(xi)?;
    check_delta(delta)?;
    let x = xi as f64;
    Ok(x * x * (1.0 - 2.0 * delta).powi(2 * xi as i32 - 2) / (4.0 * (2.0 * x - 1.0)))
}

/// Direct average `(xi^2 / 4) E[(delta + (1 - 2 delta) u)^(2 xi - 2)]` with `u`
/// uniform on `[0, 1]`, which is the distribution of `<0|W rho W^†|0>` for
/// Haar `W` on U(2). Differs from [`variance_xi_separable_m1`] when `delta > 0`.
pub fn variance_xi_separable_m1_direct(xi: usize, delta: f64) -> Result<f64> {
    check_xi(xi)?;
    check_delta(delta)?;
    let x = xi as f64;
    let p = 2 * xi as i32 - 1;
    let mean_power = if delta == 0.0 {
        1.0 / (2.0 * x - 1.0)
    } else {
        ((1.0 - delta).powi(p) - delta.powi(p)) / ((2.0 * x - 1.0) * (1.0 - 2.0 * delta))
    };
    Ok(x * x / 4.0 * mean_power)
}

fn check_xi(xi: usize) -> Result<()> {
    if xi == 0 {
        Err(Error::Precondition("xi must be at least 1".into()))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PuritySchedule {
    pub delta: f64,
    pub purity_exact: f64,
    pub purity_paper_asymptotic: f64,
}

/// Mixing schedule `delta = ln(xi) / (4 xi - 4)` that holds the m = 1 variance
/// roughly constant in `xi`.
pub fn purity_schedule(xi: usize) -> Result<PuritySchedule> {
    if xi < 2 {
        return Err(Error::Domain { value: xi as f64, domain: "xi >= 2" });
    }
    let x = xi as f64;
    let delta = x.log(PURITY_SCHEDULE_LOG_BASE) / (4.0 * x - 4.0);
    Ok(PuritySchedule {
        delta,
        purity_exact: (1.0 - delta).powi(2) + delta * delta,
        purity_paper_asymptotic: (1.0 - delta).powi(2),
    })
}

// ---------------------------------------------------------------------------
// Slow variational Grover circuit, O(gamma^2)
// ---------------------------------------------------------------------------

/// Alternating sum `sum_{l<L} (-1)^l cos(n theta_l / 2)` over the partial sums
/// `theta_0 = 0, theta_l = theta_1 + ... + theta_l`.
fn alternating_partial_sum(theta: &[f64], n: usize) -> f64 {
    let half_n = n as f64 / 2.0;
    let mut partial = 0.0;
    let mut acc = 0.0;
    for (l, &t) in std::iter::once(&0.0).chain(theta.iter()).take(theta.len()).enumerate() {
        partial += t;
        let term = (half_n * partial).cos();
        acc += if l % 2 == 0 { term } else { -term };
    }
    acc
}

/// The O(gamma^2) coefficient `f` in `C = 1 - gamma^2 f` for independent angles.
pub fn grover_slow_coefficient_general(theta: &[f64], n: usize) -> f64 {
    slow_grover_prefactor(n) * alternating_partial_sum(theta, n).powi(2)
}

pub fn grover_slow_cost_general(theta: &[f64], gamma: f64, n: usize) -> Result<ClosedFormValue> {
    check_slow_grover(n, theta.len())?;
    let f = grover_slow_coefficient_general(theta, n);
    Ok(ClosedFormValue::new(1.0 - gamma * gamma * f, OrderTag::OrderGammaSquared))
}

/// Equal-angle alternating sum and its derivative in `theta`.
fn correlated_sum_form(theta: f64, n: usize, layers: usize) -> (f64, f64) {
    let half_n = n as f64 / 2.0;
    let (mut g, mut dg) = (0.0, 0.0);
    for l in 0..layers {
        let w = half_n * l as f64;
        let (s, c) = (w * theta).sin_cos();
        if l % 2 == 0 {
            g += c;
            dg -= w * s;
        } else {
            g -= c;
            dg += w * s;
        }
    }
    (g, dg)
}

/// The O(gamma^2) coefficient with every angle equal to `theta`:
/// `K sin^2((L-1) n theta / 4) sin^2(L n theta / 4) / cos^2(n theta / 4)`.
pub fn grover_slow_coefficient(theta: f64, n: usize, layers: usize) -> f64 {
    let q = n as f64 * theta / 4.0;
    let d = q.cos();
    let k = slow_grover_prefactor(n);
    if d.abs() < SINGULAR_THRESHOLD {
        let (g, _) = correlated_sum_form(theta, n, layers);
        return k * g * g;
    }
    let a = ((layers as f64 - 1.0) * q).sin();
    let b = (layers as f64 * q).sin();
    k * (a * b / d).powi(2)
}

/// `d/dtheta` of [`grover_slow_coefficient`].
pub fn d_grover_slow_coefficient(theta: f64, n: usize, layers: usize) -> f64 {
    let nf = n as f64;
    let lf = layers as f64;
    let q = nf * theta / 4.0;
    let (ds, d) = q.sin_cos();
    let k = slow_grover_prefactor(n);
    if d.abs() < SINGULAR_DERIVATIVE_THRESHOLD {
        let (g, dg) = correlated_sum_form(theta, n, layers);
        return 2.0 * k * g * dg;
    }
    let (a, ca) = ((lf - 1.0) * q).sin_cos();
    let (b, cb) = (lf * q).sin_cos();
    let h = a * b / d;
    let dh = ((lf - 1.0) * nf / 4.0 * ca * b + lf * nf / 4.0 * a * cb) / d + a * b * (nf / 4.0) * ds / (d * d);
    2.0 * k * h * dh
}

pub fn grover_slow_cost_correlated(theta: f64, gamma: f64, n: usize, layers: usize) -> Result<ClosedFormValue> {
    check_slow_grover(n, layers)?;
    let f = grover_slow_coefficient(theta, n, layers);
    Ok(ClosedFormValue::new(1.0 - gamma * gamma * f, OrderTag::OrderGammaSquared))
}

pub fn d_grover_slow_cost_correlated(theta: f64, gamma: f64, n: usize, layers: usize) -> Result<f64> {
    check_slow_grover(n, layers)?;
    Ok(-gamma * gamma * d_grover_slow_coefficient(theta, n, layers))
}

/// Distance of `theta` from the nearest zero of `cos(n theta / 4)`.
pub fn grover_slow_singular_distance(theta: f64, n: usize) -> f64 {
    let period = 4.0 * PI / n as f64;
    let first = 2.0 * PI / n as f64;
    let r = (theta - first).rem_euclid(period);
    r.min(period - r)
}

/// Upper bound on `(dC/dtheta)^2`: `C(n, n/2)^2 n^2 gamma^4 (4 L^6 / 9) / 2^(4n - 2)`.
pub fn grover_slow_grad_bound(n: usize, layers: usize, gamma: f64) -> Result<f64> {
    check_slow_grover(n, layers)?;
    let nf = n as f64;
    let lf = layers as f64;
    let ln = 2.0 * ln_choose(n, n / 2) - (4.0 * nf - 2.0) * LN_2;
    Ok(ln.exp() * nf * nf * gamma.powi(4) * 4.0 * lf.powi(6) / 9.0)
}

/// Chebyshev bound `min(1, variance / epsilon^2)` on `P(|dC| >= epsilon)`.
pub fn chebyshev_tail(variance: f64, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::Domain { value: epsilon, domain: "epsilon > 0" });
    }
    if variance < 0.0 {
        return Err(Error::Domain { value: variance, domain: "variance >= 0" });
    }
    Ok((variance / (epsilon * epsilon)).min(1.0))
}

/// Lower bound `C(n, n/2) gamma^2 n L^2 / (pi 2^(2n))` on `E|dC/dtheta|`,
/// including the factor `n`.
pub fn grover_slow_grad_expectation_lb(n: usize, layers: usize, gamma: f64) -> Result<f64> {
    Ok(n as f64 * grover_slow_grad_expectation_lb_rederived(n, layers, gamma)?)
}

/// The same bound obtained by integrating the derivative over
/// `(2 pi (L-2) / (n (L-1)), 2 pi / n)`: `C(n, n/2) gamma^2 L^2 / (pi 2^(2n))`.
pub fn grover_slow_grad_expectation_lb_rederived(n: usize, layers: usize, gamma: f64) -> Result<f64> {
    check_slow_grover(n, layers)?;
    let lf = layers as f64;
    let ln = ln_choose(n, n / 2) - 2.0 * n as f64 * LN_2;
    Ok(ln.exp() * gamma * gamma * lf * lf / PI)
}

/// Large-`n` form `sqrt(2n) L^2 gamma^2 / (pi^(3/2) 2^n)` of the bound above.
pub fn grover_slow_grad_expectation_lb_asymptotic(n: usize, layers: usize, gamma: f64) -> f64 {
    let nf = n as f64;
    (2.0 * nf).sqrt() * (layers as f64).powi(2) * gamma * gamma / (PI.powf(1.5) * nf.exp2())
}

/// Bound on `(dC/dtheta_k)^2` for independent angles:
/// `C(n, n/2)^2 gamma^4 n^2 (L-1)^2 (L-k)^2 / 2^(4n - 2)`, `k` one-based.
pub fn grover_slow_uncorrelated_layer_bound(n: usize, layers: usize, k: usize, gamma: f64) -> Result<f64> {
    check_even(n)?;
    if k == 0 || k > layers {
        return Err(Error::Precondition(format!("layer index {k} outside 1..={layers}")));
    }
    let nf = n as f64;
    let ln = 2.0 * ln_choose(n, n / 2) - (4.0 * nf - 2.0) * LN_2;
    let lf = layers as f64;
    let kf = k as f64;
    Ok(ln.exp() * gamma.powi(4) * nf * nf * (lf - 1.0).powi(2) * (lf - kf).powi(2))
}

// ---------------------------------------------------------------------------
// Ring of disagrees, O(gamma)
// ---------------------------------------------------------------------------

/// Local MaxCut cost to first order in the driver angles:
/// `n/2 + (n/2) sum_j gamma_j sin(2 x_j)`, `x_j = beta_{j+1} + ... + beta_L`.
pub fn rod_local_cost_linear(beta: &[f64], gamma: &[f64], n: usize) -> Result<ClosedFormValue> {
    check_ring(beta, gamma, n)?;
    let half = n as f64 / 2.0;
    let mut x = 0.0;
    let mut acc = 0.0;
    for j in (0..beta.len()).rev() {
        x += beta[j];
        acc += gamma[j] * (2.0 * x).sin();
    }
    Ok(ClosedFormValue::new(half + half * acc, OrderTag::OrderGammaLinear))
}

/// `dC/dbeta_i` of [`rod_local_cost_linear`], `i` zero-based.
pub fn d_rod_local_cost_linear(beta: &[f64], gamma: &[f64], n: usize, i: usize) -> Result<f64> {
    check_ring(beta, gamma, n)?;
    if i >= beta.len() {
        return Err(Error::Precondition(format!("mixer index {i} outside 0..{}", beta.len())));
    }
    let mut x = 0.0;
    let mut acc = 0.0;
    for j in (0..beta.len()).rev() {
        x += beta[j];
        if j <= i {
            acc += gamma[j] * 2.0 * (2.0 * x).cos();
        }
    }
    Ok(n as f64 / 2.0 * acc)
}

fn check_ring(beta: &[f64], gamma: &[f64], n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::Precondition("ring needs n >= 3".into()));
    }
    if beta.len() != gamma.len() {
        return Err(Error::DimensionMismatch { expected: beta.len(), got: gamma.len() });
    }
    Ok(())
}

/// `(cos((2L+1) beta) - cos beta) / sin beta`, which telescopes to
/// `-2 sum_{k=1}^{L} sin(2 k beta)`.
fn fejer_ratio(beta: f64, layers: usize) -> f64 {
    let s = beta.sin();
    if s.abs() < SINGULAR_THRESHOLD {
        return -2.0 * (1..=layers).map(|k| (2.0 * k as f64 * beta).sin()).sum::<f64>();
    }
    (((2 * layers + 1) as f64 * beta).cos() - beta.cos()) / s
}

fn d_fejer_ratio(beta: f64, layers: usize) -> f64 {
    -4.0 * (1..=layers).map(|k| k as f64 * (2.0 * k as f64 * beta).cos()).sum::<f64>()
}

/// Projector onto the two alternating bitstrings, correlated angles, O(gamma):
/// `1/2^(n-1) - (n gamma / 2^n) (cos((2L+1) beta) - cos beta) / sin beta`.
pub fn rod_global_cost_linear(beta: f64, gamma: f64, n: usize, layers: usize) -> Result<ClosedFormValue> {
    check_rod_global(n)?;
    let nf = n as f64;
    let value = (1.0 - nf).exp2() - nf * gamma * (-nf).exp2() * fejer_ratio(beta, layers);
    Ok(ClosedFormValue::new(value, OrderTag::OrderGammaLinear))
}

pub fn d_rod_global_cost_linear(beta: f64, gamma: f64, n: usize, layers: usize) -> Result<f64> {
    check_rod_global(n)?;
    let nf = n as f64;
    Ok(-nf * gamma * (-nf).exp2() * d_fejer_ratio(beta, layers))
}

/// Distance of `beta` from the nearest multiple of `pi`.
pub fn rod_global_singular_distance(beta: f64) -> f64 {
    let r = beta.rem_euclid(PI);
    r.min(PI - r)
}

fn check_rod_global(n: usize) -> Result<()> {
    check_even(n)?;
    if n < 4 {
        return Err(Error::Precondition("ring global cost needs n >= 4".into()));
    }
    Ok(())
}

/// Large-`L` second moment `(2L+1)^3 n^2 gamma^2 / 2^(2n)` of `dC/dbeta`.
pub fn rod_global_secondmoment_asymptotic(n: usize, layers: usize, gamma: f64) -> f64 {
    let nf = n as f64;
    ((2 * layers + 1) as f64).powi(3) * nf * nf * gamma * gamma * (-2.0 * nf).exp2()
}

/// Dirichlet-kernel lower bound `(2L+1) n gamma ln(2L+1) / (pi^2 2^(n-1))` on `E|dC/dbeta|`.
pub fn rod_global_absgrad_lb(n: usize, layers: usize, gamma: f64) -> f64 {
    let nf = n as f64;
    let w = (2 * layers + 1) as f64;
    w * nf * gamma * w.ln() / (PI * PI * (nf - 1.0).exp2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn separable_pure_values() {
        assert_eq!(cost_separable_pure(0.0, 5), 0.0);
        assert_abs_diff_eq!(cost_separable_pure(PI, 1), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cost_separable_pure(PI / 2.0, 2), 0.75, epsilon = 1e-15);
        assert_eq!(d_cost_separable_pure(0.0, 7), 0.0);
    }

    #[test]
    fn separable_mixed_values() {
        for &t in &[-2.0, 0.3, 1.7] {
            for n in 1..6 {
                assert_abs_diff_eq!(
                    cost_separable_mixed(t, n, 0.0).unwrap(),
                    cost_separable_pure(t, n),
                    epsilon = 1e-15
                );
            }
        }
        assert_abs_diff_eq!(cost_separable_mixed(0.0, 1, 0.1).unwrap(), 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(cost_separable_mixed(PI, 2, 0.1).unwrap(), 0.99, epsilon = 1e-15);
        assert!(matches!(cost_separable_mixed(0.0, 2, 0.5), Err(Error::Domain { .. })));
        assert!(cost_separable_mixed(0.0, 2, -0.1).is_err());
    }

    #[test]
    fn separable_local_values() {
        assert_eq!(cost_separable_local(0.0), 0.0);
        assert_abs_diff_eq!(cost_separable_local(PI), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cost_separable_local(PI / 2.0), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn appendix_variance_exact_rationals() {
        assert_abs_diff_eq!(variance_separable_pure(1), 0.125, epsilon = 1e-15);
        assert_abs_diff_eq!(variance_separable_pure(2), 0.15625, epsilon = 1e-15);
        let v60 = variance_separable_pure(60);
        assert!((v60 - 0.776).abs() < 2e-3, "{v60}");
        let a60 = variance_separable_pure_asymptotic(60);
        assert!((a60 - 0.7725).abs() < 5e-4, "{a60}");
        assert!((v60 / a60 - 1.0).abs() < 0.01);
    }

    #[test]
    fn jxjy_asymptotic_values() {
        let v = cost_jxjy_asymptotic(0.0, 0.0, 9);
        assert_eq!(v.value, 1.0);
        assert_eq!(v.order, OrderTag::AsymptoticInN);
        let n = 16;
        assert!(cost_jxjy_asymptotic(PI * (n as f64).sqrt(), 0.0, n).value < 1e-30);
    }

    #[test]
    fn xi_separable_values() {
        assert_abs_diff_eq!(variance_xi_separable_m1(1, 0.0).unwrap(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(variance_xi_separable_m1(2, 0.0).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(variance_xi_separable_m1(2, 0.25).unwrap(), 1.0 / 12.0, epsilon = 1e-15);
        for xi in 1..10 {
            assert_abs_diff_eq!(
                variance_xi_separable_m1_direct(xi, 0.0).unwrap(),
                variance_xi_separable_m1(xi, 0.0).unwrap(),
                epsilon = 1e-14
            );
        }
        // ((3/4)^3 - (1/4)^3) * 4 / (4 * 3 * 1/2) = 0.40625 * 2/3
        assert_abs_diff_eq!(variance_xi_separable_m1_direct(2, 0.25).unwrap(), 0.40625 * 2.0 / 3.0, epsilon = 1e-15);
        assert!(variance_xi_separable_m1(2, 0.6).is_err());
    }

    #[test]
    fn purity_schedule_values() {
        let s = purity_schedule(2).unwrap();
        assert_abs_diff_eq!(s.delta, 2f64.ln() / 4.0, epsilon = 1e-15);
        assert!((s.delta - 0.17329).abs() < 1e-5);
        let s = purity_schedule(10).unwrap();
        assert!((s.delta - 0.06396).abs() < 1e-5);
        let s = purity_schedule(1_000_000).unwrap();
        assert!(s.delta < 1e-5 && s.purity_exact > 0.9999 && s.purity_paper_asymptotic > 0.9999);
        assert!(purity_schedule(1).is_err());
    }

    #[test]
    fn slow_grover_zero_angles_cancel() {
        let v = grover_slow_cost_general(&[0.0; 8], 0.5, 6).unwrap();
        assert_abs_diff_eq!(v.value, 1.0, epsilon = 1e-15);
        assert_eq!(v.order, OrderTag::OrderGammaSquared);
        assert_abs_diff_eq!(grover_slow_cost_correlated(0.0, 0.5, 6, 8).unwrap().value, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn slow_grover_minimum_at_two_pi_over_n() {
        for &(n, l) in &[(4usize, 4usize), (8, 8), (10, 12)] {
            let gamma = 0.01;
            let theta = 2.0 * PI / n as f64;
            let expected = 1.0 - gamma * gamma * (l * l) as f64 * slow_grover_prefactor(n);
            let v = grover_slow_cost_correlated(theta, gamma, n, l).unwrap().value;
            assert_abs_diff_eq!(v, expected, epsilon = 1e-14);
            let general = grover_slow_cost_general(&vec![theta; l], gamma, n).unwrap().value;
            assert_abs_diff_eq!(general, expected, epsilon = 1e-14);
        }
    }

    #[test]
    fn slow_grover_preconditions() {
        assert_eq!(grover_slow_cost_correlated(0.1, 0.1, 5, 8), Err(Error::Parity(5)));
        assert!(grover_slow_cost_correlated(0.1, 0.1, 6, 6).is_err());
        assert!(grover_slow_cost_general(&[0.0; 5], 0.1, 6).is_err());
    }

    #[test]
    fn grad_bound_values() {
        assert_abs_diff_eq!(grover_slow_grad_bound(4, 4, 1.0).unwrap(), 64.0, epsilon = 1e-10);
        let r = grover_slow_grad_bound(8, 16, 0.3).unwrap() / grover_slow_grad_bound(8, 8, 0.3).unwrap();
        assert_abs_diff_eq!(r, 64.0, epsilon = 1e-10);
    }

    #[test]
    fn chebyshev_values() {
        assert_eq!(chebyshev_tail(0.0, 0.3).unwrap(), 0.0);
        assert_abs_diff_eq!(chebyshev_tail(1e-4, 0.1).unwrap(), 0.01, epsilon = 1e-15);
        assert_eq!(chebyshev_tail(0.5, 0.1).unwrap(), 1.0);
        assert!(chebyshev_tail(0.5, 0.0).is_err());
    }

    #[test]
    fn expectation_lower_bound_values() {
        assert_abs_diff_eq!(grover_slow_grad_expectation_lb(4, 4, 1.0).unwrap(), 1.5 / PI, epsilon = 1e-14);
        assert_abs_diff_eq!(
            grover_slow_grad_expectation_lb_rederived(4, 4, 1.0).unwrap(),
            1.5 / PI / 4.0,
            epsilon = 1e-14
        );
        let r = grover_slow_grad_expectation_lb(8, 16, 0.1).unwrap() / grover_slow_grad_expectation_lb(8, 8, 0.1).unwrap();
        assert_abs_diff_eq!(r, 4.0, epsilon = 1e-12);
        let ratio = grover_slow_grad_expectation_lb(200, 8, 0.1).unwrap()
            / grover_slow_grad_expectation_lb_asymptotic(200, 8, 0.1);
        assert!((ratio - 1.0).abs() < 1e-2);
    }

    #[test]
    fn layer_bound_values() {
        assert_eq!(grover_slow_uncorrelated_layer_bound(8, 8, 8, 0.1).unwrap(), 0.0);
        assert_abs_diff_eq!(grover_slow_uncorrelated_layer_bound(4, 8, 4, 1.0).unwrap(), 27.5625, epsilon = 1e-10);
        assert!(grover_slow_uncorrelated_layer_bound(4, 8, 0, 1.0).is_err());
        assert!(grover_slow_uncorrelated_layer_bound(4, 8, 9, 1.0).is_err());
    }

    #[test]
    fn rod_local_values() {
        let v = rod_local_cost_linear(&[0.3, -1.2], &[0.0, 0.0], 6).unwrap();
        assert_eq!(v.value, 3.0);
        let (b, g) = (0.7, 0.01);
        let v = rod_local_cost_linear(&[b], &[g], 4).unwrap().value;
        assert_abs_diff_eq!(v, 2.0 + 2.0 * g * (2.0 * b).sin(), epsilon = 1e-15);
    }

    #[test]
    fn rod_local_derivative_matches_differences() {
        let beta = [0.3, -1.1, 2.0];
        let gamma = [0.2, 0.05, -0.3];
        let h = 1e-6;
        for i in 0..3 {
            let mut bp = beta;
            let mut bm = beta;
            bp[i] += h;
            bm[i] -= h;
            let fd = (rod_local_cost_linear(&bp, &gamma, 5).unwrap().value
                - rod_local_cost_linear(&bm, &gamma, 5).unwrap().value)
                / (2.0 * h);
            assert_abs_diff_eq!(d_rod_local_cost_linear(&beta, &gamma, 5, i).unwrap(), fd, epsilon = 1e-8);
        }
    }

    #[test]
    fn rod_global_values() {
        let n = 6;
        assert_abs_diff_eq!(rod_global_cost_linear(0.8, 0.0, n, 3).unwrap().value, 1.0 / 32.0, epsilon = 1e-16);
        assert_abs_diff_eq!(rod_global_cost_linear(0.0, 0.2, n, 3).unwrap().value, 1.0 / 32.0, epsilon = 1e-16);
        assert_abs_diff_eq!(rod_global_cost_linear(PI, 0.2, n, 3).unwrap().value, 1.0 / 32.0, epsilon = 1e-14);
        // Branches agree just outside the threshold.
        let b = 1e-7;
        let direct = rod_global_cost_linear(b, 0.2, n, 5).unwrap().value;
        let series = 1.0 / 32.0 + 6.0 * 0.2 / 32.0 * (1..=5).map(|k| (2.0 * k as f64 * b).sin()).sum::<f64>();
        assert_abs_diff_eq!(direct, series, epsilon = 1e-10);
    }

    #[test]
    fn rod_global_moment_and_bound_values() {
        assert_abs_diff_eq!(rod_global_secondmoment_asymptotic(4, 1, 1.0), 1.6875, epsilon = 1e-15);
        let r = rod_global_secondmoment_asymptotic(4, 2, 1.0) / rod_global_secondmoment_asymptotic(4, 1, 1.0);
        assert_abs_diff_eq!(r, (5.0f64 / 3.0).powi(3), epsilon = 1e-12);
        assert_abs_diff_eq!(rod_global_absgrad_lb(4, 1, 1.0), 12.0 * 3f64.ln() / (PI * PI * 8.0), epsilon = 1e-15);
        assert!((rod_global_absgrad_lb(4, 1, 1.0) - 0.16696).abs() < 1e-5);
        let mut prev = 0.0;
        for l in 1..50 {
            let v = rod_global_absgrad_lb(8, l, 0.1);
            assert!(v > prev);
            prev = v;
        }
    }
}
