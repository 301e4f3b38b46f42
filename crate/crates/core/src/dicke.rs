//! Exact simulation of collective-spin circuits in the symmetric subspace.
//!
//! A register of `n` qubits restricted to permutation-symmetric states is a
//! spin `n/2`. States are stored over the magnetic quantum numbers
//! `m = -n/2, ..., n/2` in ascending order, so index `n` (m = +n/2) is
//! `|0...0>` and index `n - k` is the Dicke state with `k` excitations.
//!
//! Sign conventions, used everywhere in this crate:
//! - `|0>` is the `sigma_z = +1` eigenstate and `J = (1/2) sum sigma`.
//! - [`rotate`] applies `exp(-i angle J_axis)`; a circuit factor written
//!   `exp(i alpha J_y)` is `rotate(.., Axis::Y, -alpha)`.
//! - [`oracle_phase`] applies `exp(i gamma |0...0><0...0|)`.
//! - Eigenvectors of J_x and J_y are phased so their overlap with `|0...0>`
//!   is real and positive. This fixes `phi1` to the combination whose
//!   `|0...0>` overlap after `exp(-i phi J_y)` is `sqrt(2) 2^(-n/2) cos(n phi / 2)`.

use std::collections::HashMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::domain::check_even;
use crate::error::{Error, Result};
use crate::special::ln_choose;

/// Largest register the collective simulator accepts (dimension 129).
pub const MAX_QUBITS: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DickeVector {
    n: usize,
    amps: Vec<C64>,
}

impl DickeVector {
    /// `|0...0>`, i.e. `m = +n/2`.
    pub fn zero_state(n: usize) -> Result<Self> {
        check_size(n)?;
        let mut amps = vec![C64::new(0.0, 0.0); n + 1];
        amps[n] = C64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// Basis state with `excitations` qubits in `|1>` (m = n/2 - excitations).
    pub fn dicke_state(n: usize, excitations: usize) -> Result<Self> {
        check_size(n)?;
        if excitations > n {
            return Err(Error::Precondition(format!("{excitations} excitations on {n} qubits")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); n + 1];
        amps[n - excitations] = C64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn from_amps(n: usize, amps: Vec<C64>) -> Result<Self> {
        check_size(n)?;
        if amps.len() != n + 1 {
            return Err(Error::DimensionMismatch { expected: n + 1, got: amps.len() });
        }
        Ok(Self { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    /// Amplitude on `|0...0>`.
    pub fn zero_amplitude(&self) -> C64 {
        self.amps[self.n]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &DickeVector) -> Result<C64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n + 1, got: other.n + 1 });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    fn to_dvector(&self) -> DVector<C64> {
        DVector::from_column_slice(&self.amps)
    }
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    if n > MAX_QUBITS {
        return Err(Error::Size { n, max: MAX_QUBITS });
    }
    Ok(())
}

/// Collective spin operator with its cached eigensystem.
#[derive(Debug, Clone)]
pub struct CollectiveGenerator {
    pub axis: Axis,
    pub n: usize,
    pub matrix: DMatrix<C64>,
    /// Ascending, exactly `-n/2, ..., n/2`.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector for `eigenvalues[k]`.
    pub eigenvectors: DMatrix<C64>,
}

impl CollectiveGenerator {
    fn build(axis: Axis, n: usize) -> Self {
        let dim = n + 1;
        let j = n as f64 / 2.0;
        let m = |k: usize| k as f64 - j;
        let mut matrix = DMatrix::<C64>::zeros(dim, dim);
        // <m+1|J_+|m> = sqrt(j(j+1) - m(m+1))
        let ladder = |k: usize| (j * (j + 1.0) - m(k) * (m(k) + 1.0)).max(0.0).sqrt();
        match axis {
            Axis::Z => {
                for k in 0..dim {
                    matrix[(k, k)] = C64::new(m(k), 0.0);
                }
            }
            Axis::X => {
                for k in 0..n {
                    let c = C64::new(ladder(k) / 2.0, 0.0);
                    matrix[(k + 1, k)] = c;
                    matrix[(k, k + 1)] = c;
                }
            }
            Axis::Y => {
                for k in 0..n {
                    let c = ladder(k) / 2.0;
                    matrix[(k + 1, k)] = C64::new(0.0, -c);
                    matrix[(k, k + 1)] = C64::new(0.0, c);
                }
            }
        }
        let eigenvalues: Vec<f64> = (0..dim).map(m).collect();
        let eigenvectors = if axis == Axis::Z {
            DMatrix::<C64>::identity(dim, dim)
        } else {
            let eig = SymmetricEigen::new(matrix.clone());
            let mut order: Vec<usize> = (0..dim).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
            let mut vecs = DMatrix::<C64>::zeros(dim, dim);
            for (col, &src) in order.iter().enumerate() {
                let v = eig.eigenvectors.column(src);
                // Phase so that <0...0|v> is real positive.
                let anchor = v[n];
                let phase = if anchor.norm() > 0.0 { anchor.conj() / anchor.norm() } else { C64::new(1.0, 0.0) };
                let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                for r in 0..dim {
                    vecs[(r, col)] = v[r] * phase / norm;
                }
            }
            vecs
        };
        Self { axis, n, matrix, eigenvalues, eigenvectors }
    }

    /// Max-entry error of `V diag(lambda) V^†` against the matrix.
    pub fn reconstruction_error(&self) -> f64 {
        let d = DMatrix::<C64>::from_diagonal(&DVector::from_iterator(
            self.n + 1,
            self.eigenvalues.iter().map(|&l| C64::new(l, 0.0)),
        ));
        let rebuilt = &self.eigenvectors * d * self.eigenvectors.adjoint();
        (rebuilt - &self.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Eigenvector for `eigenvalues[index]`.
    pub fn eigenvector(&self, index: usize) -> DickeVector {
        DickeVector { n: self.n, amps: self.eigenvectors.column(index).iter().copied().collect() }
    }

    /// `exp(-i angle J_axis) state`.
    pub fn apply(&self, state: &DickeVector, angle: f64) -> Result<DickeVector> {
        if state.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n + 1, got: state.n + 1 });
        }
        if self.axis == Axis::Z {
            let amps = state
                .amps
                .iter()
                .zip(&self.eigenvalues)
                .map(|(a, &l)| a * C64::from_polar(1.0, -angle * l))
                .collect();
            return Ok(DickeVector { n: self.n, amps });
        }
        let mut coeffs = self.eigenvectors.adjoint() * state.to_dvector();
        for (c, &l) in coeffs.iter_mut().zip(&self.eigenvalues) {
            *c *= C64::from_polar(1.0, -angle * l);
        }
        let out = &self.eigenvectors * coeffs;
        Ok(DickeVector { n: self.n, amps: out.iter().copied().collect() })
    }
}

type GeneratorCache = Mutex<HashMap<(Axis, usize), Arc<CollectiveGenerator>>>;

fn cache() -> &'static GeneratorCache {
    static CACHE: OnceLock<GeneratorCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// J_axis on the spin-n/2 representation, built once per `(axis, n)`.
pub fn collective_matrix(axis: Axis, n: usize) -> Result<Arc<CollectiveGenerator>> {
    check_size(n)?;
    if let Some(g) = cache().lock().expect("generator cache poisoned").get(&(axis, n)) {
        return Ok(Arc::clone(g));
    }
    // Built outside the lock; a concurrent duplicate build yields an identical value.
    let built = Arc::new(CollectiveGenerator::build(axis, n));
    let mut guard = cache().lock().expect("generator cache poisoned");
    Ok(Arc::clone(guard.entry((axis, n)).or_insert(built)))
}

/// `exp(-i angle J_axis) state`.
pub fn rotate(state: &DickeVector, axis: Axis, angle: f64) -> Result<DickeVector> {
    collective_matrix(axis, state.n)?.apply(state, angle)
}

/// `exp(i gamma |0...0><0...0|) state`.
pub fn oracle_phase(state: &DickeVector, gamma: f64) -> DickeVector {
    let mut out = state.clone();
    let n = out.n;
    out.amps[n] *= C64::from_polar(1.0, gamma);
    out
}

/// `(|m_y = -n/2> + |m_y = +n/2>) / sqrt(2)`.
pub fn phi1(n: usize) -> Result<DickeVector> {
    check_even(n)?;
    let gen = collective_matrix(Axis::Y, n)?;
    let lo = gen.eigenvector(0);
    let hi = gen.eigenvector(n);
    let amps = lo.amps.iter().zip(&hi.amps).map(|(a, b)| (a + b) * FRAC_1_SQRT_2).collect();
    Ok(DickeVector { n, amps })
}

/// Zero-weight eigenvector `|m_y = 0>` of J_y.
pub fn phi2(n: usize) -> Result<DickeVector> {
    check_even(n)?;
    Ok(collective_matrix(Axis::Y, n)?.eigenvector(n / 2))
}

/// SU(2) coherent state `(1 + |z|^2)^(-n/2) exp(z J_-) |0...0>`.
pub fn coherent_state(z: C64, n: usize) -> Result<DickeVector> {
    check_size(n)?;
    let mut amps = vec![C64::new(0.0, 0.0); n + 1];
    let r = z.norm();
    if r == 0.0 {
        amps[n] = C64::new(1.0, 0.0);
        return Ok(DickeVector { n, amps });
    }
    let ln_norm = -(n as f64) / 2.0 * (r * r).ln_1p();
    let arg = z.arg();
    for k in 0..=n {
        let ln_mag = k as f64 * r.ln() + 0.5 * ln_choose(n, k) + ln_norm;
        amps[n - k] = C64::from_polar(ln_mag.exp(), k as f64 * arg);
    }
    Ok(DickeVector { n, amps })
}

/// `<z|z'> = ((1+|z|^2)(1+|z'|^2))^(-n/2) (1 + conj(z) z')^n`.
pub fn coherent_overlap(z: C64, zp: C64, n: usize) -> C64 {
    let scale = ((1.0 + z.norm_sqr()) * (1.0 + zp.norm_sqr())).powf(-(n as f64) / 2.0);
    (C64::new(1.0, 0.0) + z.conj() * zp).powu(n as u32) * scale
}

/// Label of `exp(2 i a J_y) |z>` up to global phase:
/// `(z cos a - sin a) / (z sin a + cos a)`.
pub fn rotated_coherent_parameter(z: C64, a: f64) -> Result<C64> {
    let (s, c) = a.sin_cos();
    let den = z * s + c;
    if den.norm() < 1e-12 {
        return Err(Error::Pole(den.norm()));
    }
    Ok((z * c - s) / den)
}

/// Variational Grover cost `1 - |<0...0| (exp(i alpha J_y) exp(i gamma P_0))^L |phi1>|^2`
/// evaluated by explicit rotations.
pub fn grover_cost_exact(alpha: f64, gamma: f64, n: usize, layers: usize) -> Result<f64> {
    let gen = collective_matrix(Axis::Y, n)?;
    let mut state = phi1(n)?;
    for _ in 0..layers {
        state = oracle_phase(&state, gamma);
        state = gen.apply(&state, -alpha)?;
    }
    Ok(1.0 - state.zero_amplitude().norm_sqr())
}

/// Correlated variational Grover circuit worked in the J_y eigenbasis.
///
/// With eigenvectors phased as in this module, `|0...0>` has coordinates
/// `u_k = sqrt(C(n, k) / 2^n)`, `phi1` is `(e_0 + e_n) / sqrt(2)` and every
/// rotation is diagonal, so one layer costs O(n).
#[derive(Debug, Clone)]
pub struct GroverEvaluator {
    n: usize,
    weights: Vec<f64>,
    eigenvalues: Vec<f64>,
}

impl GroverEvaluator {
    pub fn new(n: usize) -> Result<Self> {
        check_even(n)?;
        check_size(n)?;
        let half_ln_total = n as f64 * std::f64::consts::LN_2 / 2.0;
        let weights = (0..=n).map(|k| (0.5 * ln_choose(n, k) - half_ln_total).exp()).collect();
        let eigenvalues = (0..=n).map(|k| k as f64 - n as f64 / 2.0).collect();
        Ok(Self { n, weights, eigenvalues })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn initial(&self) -> Vec<C64> {
        let mut s = vec![C64::new(0.0, 0.0); self.n + 1];
        s[0] = C64::new(FRAC_1_SQRT_2, 0.0);
        s[self.n] = C64::new(FRAC_1_SQRT_2, 0.0);
        s
    }

    fn layer(&self, s: &mut [C64], rotation: &[C64], kick: C64) {
        let overlap: C64 = self.weights.iter().zip(s.iter()).map(|(w, a)| a * w).sum();
        let shift = kick * overlap;
        for ((a, w), r) in s.iter_mut().zip(&self.weights).zip(rotation) {
            *a = (*a + shift * w) * r;
        }
    }

    fn zero_overlap(&self, s: &[C64]) -> C64 {
        self.weights.iter().zip(s).map(|(w, a)| a * w).sum()
    }

    fn rotation(&self, alpha: f64) -> Vec<C64> {
        self.eigenvalues.iter().map(|&l| C64::from_polar(1.0, alpha * l)).collect()
    }

    /// `|<0...0| R(alpha, gamma)_L |phi1>|^2`.
    pub fn fidelity(&self, alpha: f64, gamma: f64, layers: usize) -> f64 {
        let rot = self.rotation(alpha);
        let kick = C64::from_polar(1.0, gamma) - 1.0;
        let mut s = self.initial();
        for _ in 0..layers {
            self.layer(&mut s, &rot, kick);
        }
        self.zero_overlap(&s).norm_sqr()
    }

    pub fn cost(&self, alpha: f64, gamma: f64, layers: usize) -> f64 {
        1.0 - self.fidelity(alpha, gamma, layers)
    }

    /// Fidelities after `0, 1, ..., max_layers` layers.
    pub fn fidelity_sweep(&self, alpha: f64, gamma: f64, max_layers: usize) -> Vec<f64> {
        let rot = self.rotation(alpha);
        let kick = C64::from_polar(1.0, gamma) - 1.0;
        let mut s = self.initial();
        let mut out = Vec::with_capacity(max_layers + 1);
        out.push(self.zero_overlap(&s).norm_sqr());
        for _ in 0..max_layers {
            self.layer(&mut s, &rot, kick);
            out.push(self.zero_overlap(&s).norm_sqr());
        }
        out
    }
}

/// Slow variational Grover cost `1 - |<phi2| M(theta, gamma)_L |phi1>|^2` with
/// layers `exp(i gamma C)`, `exp(i theta_{2j-1} J_y)`, `exp(-i gamma C)`,
/// `exp(i theta_{2j} J_y)`.
pub fn grover_slow_cost_exact(theta: &[f64], gamma: f64, n: usize) -> Result<f64> {
    crate::domain::check_slow_grover(n, theta.len())?;
    let gen = collective_matrix(Axis::Y, n)?;
    let mut state = phi1(n)?;
    for pair in theta.chunks(2) {
        state = oracle_phase(&state, gamma);
        state = gen.apply(&state, -pair[0])?;
        state = oracle_phase(&state, -gamma);
        state = gen.apply(&state, -pair[1])?;
    }
    Ok(1.0 - phi2(n)?.inner(&state)?.norm_sqr())
}

/// `|<0...0| prod_j exp(-i beta_j J_x / sqrt n) exp(-i alpha_j J_y / sqrt n) |0...0>|^2`.
pub fn jxjy_cost_exact(beta: &[f64], alpha: &[f64], n: usize) -> Result<f64> {
    if beta.len() != alpha.len() {
        return Err(Error::DimensionMismatch { expected: beta.len(), got: alpha.len() });
    }
    let gx = collective_matrix(Axis::X, n)?;
    let gy = collective_matrix(Axis::Y, n)?;
    let scale = 1.0 / (n as f64).sqrt();
    let mut state = DickeVector::zero_state(n)?;
    for (&b, &a) in beta.iter().zip(alpha) {
        state = gy.apply(&state, a * scale)?;
        state = gx.apply(&state, b * scale)?;
    }
    Ok(state.zero_amplitude().norm_sqr())
}

/// A gate of a collective circuit: a global rotation or the rank-one oracle phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CollectiveOp {
    Rotate { axis: Axis, angle: f64 },
    OraclePhase { gamma: f64 },
}

pub fn apply_ops(state: &DickeVector, ops: &[CollectiveOp]) -> Result<DickeVector> {
    let mut s = state.clone();
    for op in ops {
        s = match *op {
            CollectiveOp::Rotate { axis, angle } => rotate(&s, axis, angle)?,
            CollectiveOp::OraclePhase { gamma } => oracle_phase(&s, gamma),
        };
    }
    Ok(s)
}
