//! Full `2^n` statevector simulator and the ring-of-disagrees QAOA circuit.
//!
//! Basis index `b` stores qubit `j + 1` in bit `j`; a clear bit is `|0>`, so
//! `|0...0>` is index 0. The simulator doubles as the reference oracle for
//! the collective-spin code in [`crate::dicke`].

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::dicke::{Axis, CollectiveOp, DickeVector};
use crate::domain::check_even;
use crate::error::{Error, Result};
use crate::special::ln_choose;

pub const MAX_QUBITS: usize = 14;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
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

impl StateVector {
    pub fn zero_state(n: usize) -> Result<Self> {
        Self::basis_state(n, 0)
    }

    pub fn basis_state(n: usize, index: usize) -> Result<Self> {
        check_size(n)?;
        if index >= 1 << n {
            return Err(Error::DimensionMismatch { expected: 1 << n, got: index });
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// `(|0> + |1>)^n / 2^(n/2)`, the top eigenvector of J_x.
    pub fn uniform(n: usize) -> Result<Self> {
        check_size(n)?;
        let a = C64::new((-(n as f64) / 2.0).exp2(), 0.0);
        Ok(Self { n, amps: vec![a; 1 << n] })
    }

    pub fn from_amps(n: usize, amps: Vec<C64>) -> Result<Self> {
        check_size(n)?;
        if amps.len() != 1 << n {
            return Err(Error::DimensionMismatch { expected: 1 << n, got: amps.len() });
        }
        Ok(Self { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: 1 << self.n, got: 1 << other.n });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Relabels qubits so that qubit `j` moves to position `perm[j]`.
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: perm.len() });
        }
        let mut amps = vec![C64::new(0.0, 0.0); self.amps.len()];
        for (b, &a) in self.amps.iter().enumerate() {
            let mut target = 0;
            for (j, &p) in perm.iter().enumerate() {
                target |= ((b >> j) & 1) << p;
            }
            amps[target] = a;
        }
        Ok(Self { n: self.n, amps })
    }

    fn apply_single(&mut self, qubit: usize, gate: [[C64; 2]; 2]) {
        let mask = 1 << qubit;
        for b in 0..self.amps.len() {
            if b & mask == 0 {
                let a0 = self.amps[b];
                let a1 = self.amps[b | mask];
                self.amps[b] = gate[0][0] * a0 + gate[0][1] * a1;
                self.amps[b | mask] = gate[1][0] * a0 + gate[1][1] * a1;
            }
        }
    }

    fn apply_diagonal(&mut self, values: &[f64], t: f64) {
        for (a, &v) in self.amps.iter_mut().zip(values) {
            *a *= C64::from_polar(1.0, -t * v);
        }
    }
}

/// `exp(-i (theta / 2) sigma_axis)` in the `(|0>, |1>)` basis.
fn pauli_rotation(axis: Axis, theta: f64) -> [[C64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    let z = C64::new(0.0, 0.0);
    match axis {
        Axis::X => [[C64::new(c, 0.0), C64::new(0.0, -s)], [C64::new(0.0, -s), C64::new(c, 0.0)]],
        Axis::Y => [[C64::new(c, 0.0), C64::new(-s, 0.0)], [C64::new(s, 0.0), C64::new(c, 0.0)]],
        Axis::Z => [[C64::new(c, -s), z], [z, C64::new(c, s)]],
    }
}

/// Applies `prod_j exp(-i (theta_j / 2) sigma_axis^(j))`.
pub fn product_rotation(state: &StateVector, angles: &[f64], axis: Axis) -> Result<StateVector> {
    if angles.len() != state.n {
        return Err(Error::DimensionMismatch { expected: state.n, got: angles.len() });
    }
    let mut out = state.clone();
    for (q, &theta) in angles.iter().enumerate() {
        out.apply_single(q, pauli_rotation(axis, theta));
    }
    Ok(out)
}

/// `exp(i gamma |0...0><0...0|)`.
pub fn oracle_phase(state: &StateVector, gamma: f64) -> StateVector {
    let mut out = state.clone();
    out.amps[0] *= C64::from_polar(1.0, gamma);
    out
}

/// Collective gates acting on the full register; a rotation by `angle`
/// about an axis is the equal-angle product rotation.
pub fn apply_ops(state: &StateVector, ops: &[CollectiveOp]) -> Result<StateVector> {
    let mut s = state.clone();
    for op in ops {
        s = match *op {
            CollectiveOp::Rotate { axis, angle } => product_rotation(&s, &vec![angle; s.n], axis)?,
            CollectiveOp::OraclePhase { gamma } => oracle_phase(&s, gamma),
        };
    }
    Ok(s)
}

/// Symmetric embedding: each bitstring with `k` ones gets `amps[n - k] / sqrt(C(n, k))`.
pub fn embed_dicke(dicke: &DickeVector) -> Result<StateVector> {
    let n = dicke.n();
    check_size(n)?;
    let weights: Vec<C64> =
        (0..=n).map(|k| dicke.amps()[n - k] * (-0.5 * ln_choose(n, k)).exp()).collect();
    let amps: Vec<C64> = (0..1usize << n).map(|b| weights[b.count_ones() as usize]).collect();
    let mut out = StateVector { n, amps };
    let norm = out.norm_sqr().sqrt();
    if norm > 0.0 {
        out.amps.iter_mut().for_each(|a| *a /= norm);
    }
    Ok(out)
}

/// Diagonal of `C = n/2 - (1/2) sum_j Z_j Z_{j+1}` on the ring: the number of
/// disagreeing neighbours in each bitstring.
#[derive(Debug, Clone, PartialEq)]
pub struct RingCostDiagonal {
    n: usize,
    values: Vec<f64>,
}

impl RingCostDiagonal {
    pub fn new(n: usize) -> Result<Self> {
        check_size(n)?;
        if n < 3 {
            return Err(Error::Precondition("ring needs n >= 3".into()));
        }
        let values = (0..1usize << n)
            .map(|b| {
                let rotated = ((b >> 1) | ((b & 1) << (n - 1))) as u32;
                (b as u32 ^ rotated).count_ones() as f64
            })
            .collect();
        Ok(Self { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `<state|C|state>`.
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        if state.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: state.n });
        }
        Ok(state.amps.iter().zip(&self.values).map(|(a, v)| a.norm_sqr() * v).sum())
    }
}

/// `(|0>|1>)^(n/2)`: odd-numbered qubits in `|0>`, even-numbered in `|1>`.
pub fn ring_psi1(n: usize) -> Result<StateVector> {
    check_even(n)?;
    let index = (0..n).filter(|j| j % 2 == 1).fold(0, |acc, j| acc | 1 << j);
    StateVector::basis_state(n, index)
}

/// `(|1>|0>)^(n/2)`.
pub fn ring_psi2(n: usize) -> Result<StateVector> {
    check_even(n)?;
    let index = (0..n).filter(|j| j % 2 == 0).fold(0, |acc, j| acc | 1 << j);
    StateVector::basis_state(n, index)
}

fn check_ring(n: usize) -> Result<()> {
    check_even(n)?;
    if n > MAX_QUBITS {
        return Err(Error::Size { n, max: MAX_QUBITS });
    }
    if n < 4 {
        return Err(Error::Precondition("ring QAOA needs n >= 4".into()));
    }
    Ok(())
}

/// `prod_k exp(-i beta_k J_x) exp(-i gamma_k C) |+>^n`, layer 1 applied first.
pub fn ring_qaoa_state(beta: &[f64], gamma: &[f64], n: usize) -> Result<StateVector> {
    check_ring(n)?;
    if beta.len() != gamma.len() {
        return Err(Error::DimensionMismatch { expected: beta.len(), got: gamma.len() });
    }
    let diag = RingCostDiagonal::new(n)?;
    Ok(ring_qaoa_with(&diag, beta, gamma))
}

fn ring_qaoa_with(diag: &RingCostDiagonal, beta: &[f64], gamma: &[f64]) -> StateVector {
    let n = diag.n;
    let mut s = StateVector::uniform(n).expect("size checked by caller");
    for (&b, &g) in beta.iter().zip(gamma) {
        s.apply_diagonal(&diag.values, g);
        let gate = pauli_rotation(Axis::X, b);
        for q in 0..n {
            s.apply_single(q, gate);
        }
    }
    s
}

/// Local ring cost `<C>`.
pub fn cost_ring_local(state: &StateVector) -> Result<f64> {
    RingCostDiagonal::new(state.n)?.expectation(state)
}

/// Global ring cost `|<psi1|state>|^2 + |<psi2|state>|^2`.
pub fn cost_ring_global(state: &StateVector) -> Result<f64> {
    let p1 = ring_psi1(state.n)?;
    let p2 = ring_psi2(state.n)?;
    Ok(p1.inner(state)?.norm_sqr() + p2.inner(state)?.norm_sqr())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QaoaOptimum {
    pub beta: f64,
    pub gamma: f64,
    pub value: f64,
}

/// Maximizes the local ring cost over correlated angles `beta_k = beta`,
/// `gamma_k = gamma`: a `grid x grid` scan of `[-pi, pi) x [0, pi/2)`, then
/// coordinate ascent from the best cell with steps starting at the grid
/// spacing and halving whenever a pass makes no progress.
pub fn maximize_correlated_qaoa(n: usize, layers: usize, grid: usize, refinements: usize) -> Result<QaoaOptimum> {
    use std::f64::consts::{FRAC_PI_2, PI, TAU};
    check_ring(n)?;
    if n > 10 {
        return Err(Error::Size { n, max: 10 });
    }
    if !(1..=6).contains(&layers) {
        return Err(Error::Precondition(format!("L = {layers} outside 1..=6")));
    }
    if grid == 0 {
        return Err(Error::Precondition("grid must be positive".into()));
    }
    let diag = RingCostDiagonal::new(n)?;
    let eval = |b: f64, g: f64| {
        let s = ring_qaoa_with(&diag, &vec![b; layers], &vec![g; layers]);
        diag.expectation(&s).expect("sizes match")
    };
    let db = TAU / grid as f64;
    let dg = FRAC_PI_2 / grid as f64;
    let cells: Vec<(f64, f64)> = (0..grid)
        .flat_map(|i| (0..grid).map(move |j| (-PI + db * i as f64, dg * j as f64)))
        .collect();
    let values: Vec<f64> = cells.par_iter().map(|&(b, g)| eval(b, g)).collect();
    // cells are in lexicographic order, so the first maximum wins ties
    let mut best_idx = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best_idx] {
            best_idx = i;
        }
    }
    let (mut beta, mut gamma) = cells[best_idx];
    let mut value = values[best_idx];
    let mut steps = [db, dg];
    for _ in 0..refinements {
        if steps.iter().all(|&s| s < 1e-6) {
            break;
        }
        let mut moved = false;
        for coord in 0..2 {
            for dir in [1.0, -1.0] {
                let (b, g) = if coord == 0 {
                    (beta + dir * steps[0], gamma)
                } else {
                    (beta, gamma + dir * steps[1])
                };
                let v = eval(b, g);
                if v > value {
                    (beta, gamma, value) = (b, g, v);
                    moved = true;
                    break;
                }
            }
        }
        if !moved {
            steps.iter_mut().for_each(|s| *s /= 2.0);
        }
    }
    Ok(QaoaOptimum { beta, gamma, value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn single_qubit_y_pi_flips() {
        let s = product_rotation(&StateVector::zero_state(1).unwrap(), &[PI], Axis::Y).unwrap();
        assert_abs_diff_eq!(s.amps()[1].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amps()[0].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_angles_are_identity() {
        let s = StateVector::uniform(3).unwrap();
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            assert_eq!(product_rotation(&s, &[0.0; 3], axis).unwrap(), s);
        }
        assert!(product_rotation(&s, &[0.0; 2], Axis::X).is_err());
    }

    #[test]
    fn two_qubit_y_rotation_overlap() {
        // |<00| Y(pi/2)^2 |00>|^2 = cos^4(pi/4) = 1/4
        let s = product_rotation(&StateVector::zero_state(2).unwrap(), &[PI / 2.0; 2], Axis::Y).unwrap();
        assert_abs_diff_eq!(1.0 - s.amps()[0].norm_sqr(), 0.75, epsilon = 1e-15);
    }

    #[test]
    fn ring_diagonal_values() {
        let d = RingCostDiagonal::new(6).unwrap();
        assert_eq!(d.values()[0], 0.0);
        let maxima: Vec<usize> = (0..64).filter(|&b| d.values()[b] == 6.0).collect();
        assert_eq!(maxima, vec![0b010101, 0b101010]);
        assert!(d.values().iter().all(|v| v.fract() == 0.0 && *v <= 6.0));
    }

    #[test]
    fn ring_costs_on_reference_states() {
        for n in [4usize, 6, 8] {
            let p1 = ring_psi1(n).unwrap();
            assert_eq!(cost_ring_local(&p1).unwrap(), n as f64);
            assert_eq!(cost_ring_global(&p1).unwrap(), 1.0);
            let z = StateVector::zero_state(n).unwrap();
            assert_eq!(cost_ring_local(&z).unwrap(), 0.0);
            assert_eq!(cost_ring_global(&z).unwrap(), 0.0);
            let u = StateVector::uniform(n).unwrap();
            assert_abs_diff_eq!(cost_ring_local(&u).unwrap(), n as f64 / 2.0, epsilon = 1e-12);
            assert_abs_diff_eq!(cost_ring_global(&u).unwrap(), (1.0 - n as f64).exp2(), epsilon = 1e-15);
        }
    }

    #[test]
    fn qaoa_without_driver_stays_uniform() {
        let s = ring_qaoa_state(&[0.4, 1.3], &[0.0, 0.0], 6).unwrap();
        let overlap = StateVector::uniform(6).unwrap().inner(&s).unwrap();
        assert_abs_diff_eq!(overlap.norm(), 1.0, epsilon = 1e-12);
        let empty = ring_qaoa_state(&[], &[], 4).unwrap();
        assert_abs_diff_eq!(cost_ring_local(&empty).unwrap(), 2.0, epsilon = 1e-12);
        assert_eq!(ring_qaoa_state(&[0.1], &[0.1], 5), Err(Error::Parity(5)));
        assert!(matches!(ring_qaoa_state(&[0.1], &[0.1], 16), Err(Error::Size { .. })));
    }

    #[test]
    fn qaoa_cost_is_translation_invariant() {
        let n = 6;
        let s = ring_qaoa_state(&[0.3, -1.1, 0.8], &[0.7, 0.2, 1.4], n).unwrap();
        let shift: Vec<usize> = (0..n).map(|j| (j + 1) % n).collect();
        let t = s.permute_qubits(&shift).unwrap();
        assert_abs_diff_eq!(cost_ring_local(&s).unwrap(), cost_ring_local(&t).unwrap(), epsilon = 1e-12);
        assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn embed_dicke_examples() {
        let top = DickeVector::zero_state(3).unwrap();
        assert_eq!(embed_dicke(&top).unwrap(), StateVector::zero_state(3).unwrap());
        let mid = DickeVector::dicke_state(2, 1).unwrap();
        let e = embed_dicke(&mid).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(e.amps()[0b01].re, h, epsilon = 1e-15);
        assert_abs_diff_eq!(e.amps()[0b10].re, h, epsilon = 1e-15);
        assert_eq!(e.amps()[0], C64::new(0.0, 0.0));
        assert!(matches!(embed_dicke(&DickeVector::zero_state(15).unwrap()), Err(Error::Size { .. })));
    }

    #[test]
    fn optimizer_is_bounded_and_consistent() {
        let coarse = maximize_correlated_qaoa(4, 1, 24, 80).unwrap();
        assert!(coarse.value <= 4.0 + 1e-12 && coarse.value > 2.0);
        let fine = maximize_correlated_qaoa(4, 1, 48, 80).unwrap();
        assert!((coarse.value - fine.value).abs() < 1e-3);
        assert!(maximize_correlated_qaoa(12, 1, 8, 1).is_err());
        assert!(maximize_correlated_qaoa(4, 7, 8, 1).is_err());
    }
}
