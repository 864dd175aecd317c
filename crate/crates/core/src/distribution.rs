//! Pauli expectations and the exact Pauli and Bell-outcome distributions.
//!
//! Both distributions use one Walsh-Hadamard transform per X-part `v`:
//! alpha(v, w) = i^{v.w} sum_u (-1)^{w.u} conj(psi_{u^v}) psi_u, so the full
//! table costs O(n 4^n) rather than 4^n expectations of cost 2^n.

use nalgebra::DMatrix;

use crate::error::{guard, Error, Result};
use crate::pauli::PauliString;
use crate::state::{i_pow, PureState, C64};

/// Dense enumeration of the 4^n Pauli labels is capped here.
pub const MAX_DISTRIBUTION_QUBITS: usize = 12;
/// Dense operator materialization cap.
pub const MAX_MATRIX_QUBITS: usize = 12;

/// In-place unnormalized Walsh-Hadamard transform.
pub(crate) fn fwht(a: &mut [C64]) {
    let mut h = 1;
    while h < a.len() {
        for i in (0..a.len()).step_by(2 * h) {
            for j in i..i + h {
                let (x, y) = (a[j], a[j + h]);
                a[j] = x + y;
                a[j + h] = x - y;
            }
        }
        h *= 2;
    }
}

/// Dense 2^n x 2^n matrix of P_x.
pub fn pauli_matrix(p: &PauliString) -> Result<DMatrix<C64>> {
    let n = p.num_qubits();
    guard(n, MAX_MATRIX_QUBITS)?;
    let d = 1usize << n;
    let (v, w) = (p.x_mask() as usize, p.z_mask() as usize);
    let ph = i_pow(p.y_count());
    let mut m = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
    for u in 0..d {
        let sign = if (w & u).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        m[(u ^ v, u)] = ph * sign;
    }
    Ok(m)
}

/// tr(rho P) for rho = |psi><psi|, computed in O(2^n) from the bit action.
pub fn expectation(state: &PureState, p: &PauliString) -> Result<f64> {
    let n = state.num_qubits();
    if p.num_qubits() != n {
        return Err(Error::DimensionMismatch { expected: n, got: p.num_qubits() });
    }
    let (v, w) = (p.x_mask() as usize, p.z_mask() as usize);
    let a = state.amplitudes();
    let mut acc = C64::new(0.0, 0.0);
    for u in 0..a.len() {
        let t = a[u ^ v].conj() * a[u];
        if (w & u).count_ones() % 2 == 0 {
            acc += t;
        } else {
            acc -= t;
        }
    }
    Ok((i_pow(p.y_count()) * acc).re)
}

/// Exact Pauli distribution p(x) = tr(rho P_x)^2 / 2^n stored densely,
/// indexed by `PauliString::index` = (v << n) | w.
#[derive(Clone, Debug)]
pub struct PauliDistribution {
    n: usize,
    probs: Vec<f64>,
}

impl PauliDistribution {
    pub fn from_probabilities(n: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1usize << (2 * n) {
            return Err(Error::InvalidArgument("probability table must have 4^n entries".into()));
        }
        Ok(Self { n, probs })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, p: &PauliString) -> f64 {
        self.probs[p.index()]
    }

    /// alpha(x)^2 = 2^n p(x) (pure states only).
    pub fn alpha_sq(&self, idx: usize) -> f64 {
        self.probs[idx] * (1u64 << self.n) as f64
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Iterator over (label, probability) with positive probability.
    pub fn support(&self, tol: f64) -> impl Iterator<Item = (PauliString, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(move |(_, p)| **p > tol)
            .map(move |(i, p)| (PauliString::from_index(self.n, i), *p))
    }

    /// Total variation distance to another table on the same labels.
    pub fn tv_distance(&self, other: &[f64]) -> f64 {
        0.5 * self.probs.iter().zip(other).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }
}

/// All 4^n expectations alpha(x), indexed like `PauliDistribution`.
pub fn all_expectations(state: &PureState) -> Result<Vec<f64>> {
    let n = state.num_qubits();
    guard(n, MAX_DISTRIBUTION_QUBITS)?;
    let d = 1usize << n;
    let a = state.amplitudes();
    let mut out = vec![0.0; d * d];
    let mut buf = vec![C64::new(0.0, 0.0); d];
    for v in 0..d {
        for u in 0..d {
            buf[u] = a[u ^ v].conj() * a[u];
        }
        fwht(&mut buf);
        for w in 0..d {
            out[(v << n) | w] = (i_pow((v & w).count_ones()) * buf[w]).re;
        }
    }
    Ok(out)
}

pub fn pauli_distribution(state: &PureState) -> Result<PauliDistribution> {
    let n = state.num_qubits();
    let scale = 1.0 / (1u64 << n) as f64;
    let probs = all_expectations(state)?.into_iter().map(|a| a * a * scale).collect();
    Ok(PauliDistribution { n, probs })
}

/// Probability of each Bell outcome y when measuring phi1 ⊗ phi2 in the Bell
/// basis |P_y> = (P_y ⊗ I)|Phi+>, qubit i paired with qubit i + n.
///
/// <P_y|phi1 ⊗ phi2> = 2^{-n/2} i^{v.w} sum_u (-1)^{w.u} phi1_u phi2_{u^v}.
pub fn bell_outcome_distribution(phi1: &PureState, phi2: &PureState) -> Result<Vec<f64>> {
    phi1.check_same(phi2)?;
    let n = phi1.num_qubits();
    guard(n, MAX_DISTRIBUTION_QUBITS)?;
    let d = 1usize << n;
    let (a, b) = (phi1.amplitudes(), phi2.amplitudes());
    let scale = 1.0 / d as f64;
    let mut out = vec![0.0; d * d];
    let mut buf = vec![C64::new(0.0, 0.0); d];
    for v in 0..d {
        for u in 0..d {
            buf[u] = a[u] * b[u ^ v];
        }
        fwht(&mut buf);
        for w in 0..d {
            out[(v << n) | w] = buf[w].norm_sqr() * scale;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn y_matrix() {
        let m = pauli_matrix(&PauliString::from_letters("Y").unwrap()).unwrap();
        assert_eq!(m[(0, 1)], C64::new(0.0, -1.0));
        assert_eq!(m[(1, 0)], C64::new(0.0, 1.0));
        assert_eq!(m[(0, 0)], C64::new(0.0, 0.0));
    }

    #[test]
    fn x_matrix_and_identity() {
        let m = pauli_matrix(&PauliString::from_letters("X").unwrap()).unwrap();
        assert_eq!(m[(0, 1)], C64::new(1.0, 0.0));
        let id = pauli_matrix(&PauliString::identity(2)).unwrap();
        assert_eq!(id, DMatrix::identity(4, 4));
    }

    #[test]
    fn t_state_expectations() {
        let t = PureState::t_state();
        let x = expectation(&t, &PauliString::from_letters("X").unwrap()).unwrap();
        let z = expectation(&t, &PauliString::from_letters("Z").unwrap()).unwrap();
        assert!((x - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(z.abs() < 1e-12);
    }

    #[test]
    fn fwht_route_matches_direct_expectation() {
        let s = PureState::product("T+i").unwrap();
        let all = all_expectations(&s).unwrap();
        for (i, a) in all.iter().enumerate() {
            let p = PauliString::from_index(3, i);
            assert!((a - expectation(&s, &p).unwrap()).abs() < 1e-12, "{p}");
        }
    }
}
