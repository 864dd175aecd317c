//! Uniformly random Clifford circuits.
//!
//! Sampling walks the coset chain of the symplectic group: for qubit i pick
//! the image of X_i uniformly among the nonidentity Paulis on qubits i..n and
//! the image of Z_i uniformly among those anticommuting with it, then fix a
//! canonical circuit mapping (X_i, Z_i) to that pair. The product over i of
//! these coset representatives, times a uniform Pauli, is uniform over the
//! Clifford group modulo global phase.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{low_mask, PauliString};
use crate::state::PureState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cx(usize, usize),
    Cz(usize, usize),
}

impl Gate {
    pub fn inverse(self) -> Gate {
        match self {
            Gate::S(q) => Gate::Sdg(q),
            Gate::Sdg(q) => Gate::S(q),
            g => g,
        }
    }

    fn remap(self, map: &[usize]) -> Gate {
        match self {
            Gate::H(q) => Gate::H(map[q]),
            Gate::S(q) => Gate::S(map[q]),
            Gate::Sdg(q) => Gate::Sdg(map[q]),
            Gate::X(q) => Gate::X(map[q]),
            Gate::Y(q) => Gate::Y(map[q]),
            Gate::Z(q) => Gate::Z(map[q]),
            Gate::Cx(a, b) => Gate::Cx(map[a], map[b]),
            Gate::Cz(a, b) => Gate::Cz(map[a], map[b]),
        }
    }

    pub fn apply(self, s: &mut PureState) {
        match self {
            Gate::H(q) => s.h(q),
            Gate::S(q) => s.s(q),
            Gate::Sdg(q) => s.sdg(q),
            Gate::X(q) => s.x(q),
            Gate::Y(q) => s.y(q),
            Gate::Z(q) => s.z(q),
            Gate::Cx(a, b) => s.cnot(a, b),
            Gate::Cz(a, b) => s.cz(a, b),
        }
    }
}

/// Signed Pauli (-1)^sign P used for tableau tracking.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignedPauli {
    pub negative: bool,
    pub pauli: PauliString,
}

/// Clifford unitary as a gate list applied left to right.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clifford {
    n: usize,
    gates: Vec<Gate>,
}

impl Clifford {
    pub fn identity(n: usize) -> Self {
        Self { n, gates: Vec::new() }
    }

    pub fn from_gates(n: usize, gates: Vec<Gate>) -> Self {
        Self { n, gates }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Uniformly random n-qubit Clifford (modulo global phase).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut gates = Vec::new();
        // Pauli frame applied first
        let (xs, zs) = (rng.random::<u64>() & low_mask(n), rng.random::<u64>() & low_mask(n));
        for q in 0..n {
            let b = n - 1 - q;
            if (xs >> b) & 1 == 1 {
                gates.push(Gate::X(q));
            }
            if (zs >> b) & 1 == 1 {
                gates.push(Gate::Z(q));
            }
        }
        let mut layers = Vec::with_capacity(n);
        for i in 0..n {
            let m = n - i;
            let mask = low_mask(m);
            let p = loop {
                let (v, w) = (rng.random::<u64>() & mask, rng.random::<u64>() & mask);
                if v | w != 0 {
                    break PauliString::from_masks(n, v, w);
                }
            };
            let q = loop {
                let (v, w) = (rng.random::<u64>() & mask, rng.random::<u64>() & mask);
                let cand = PauliString::from_masks(n, v, w);
                if !cand.commutes_with(&p) {
                    break cand;
                }
            };
            layers.push(reduce_pair(n, i, p, q));
        }
        // C = C_0 C_1 ... C_{n-1} D with C_i the inverse of the reducing circuit;
        // applied to a state: D, then C_{n-1}, ..., then C_0.
        for red in layers.into_iter().rev() {
            gates.extend(red.into_iter().rev().map(Gate::inverse));
        }
        Self { n, gates }
    }

    /// Independent uniform single-qubit Cliffords on every qubit.
    pub fn random_local<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut gates = Vec::new();
        for q in 0..n {
            let one = Clifford::random(1, rng);
            gates.extend(one.gates.iter().map(|g| g.remap(&[q])));
        }
        Self { n, gates }
    }

    pub fn apply(&self, state: &mut PureState) -> Result<()> {
        if state.num_qubits() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: state.num_qubits() });
        }
        for g in &self.gates {
            g.apply(state);
        }
        Ok(())
    }

    /// C P C^dagger, tracked symbolically.
    pub fn conjugate(&self, p: &PauliString) -> Result<SignedPauli> {
        if p.num_qubits() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: p.num_qubits() });
        }
        let mut row = Row { n: self.n, v: p.x_mask(), w: p.z_mask(), neg: false };
        for g in &self.gates {
            row.conj(*g);
        }
        Ok(SignedPauli { negative: row.neg, pauli: PauliString::from_masks(self.n, row.v, row.w) })
    }
}

/// Tableau row in the Hermitian convention (-1)^neg i^{v.w} X^v Z^w.
#[derive(Clone, Copy, Debug)]
struct Row {
    n: usize,
    v: u64,
    w: u64,
    neg: bool,
}

impl Row {
    fn bits(&self, q: usize) -> (bool, bool) {
        let s = self.n - 1 - q;
        ((self.v >> s) & 1 == 1, (self.w >> s) & 1 == 1)
    }

    fn set(&mut self, q: usize, x: bool, z: bool) {
        let b = 1u64 << (self.n - 1 - q);
        self.v = if x { self.v | b } else { self.v & !b };
        self.w = if z { self.w | b } else { self.w & !b };
    }

    /// row <- G row G^dagger.
    fn conj(&mut self, g: Gate) {
        match g {
            Gate::H(q) => {
                let (x, z) = self.bits(q);
                self.neg ^= x & z;
                self.set(q, z, x);
            }
            Gate::S(q) => {
                let (x, z) = self.bits(q);
                self.neg ^= x & z;
                self.set(q, x, z ^ x);
            }
            Gate::Sdg(q) => {
                for _ in 0..3 {
                    self.conj(Gate::S(q));
                }
            }
            Gate::X(q) => self.neg ^= self.bits(q).1,
            Gate::Z(q) => self.neg ^= self.bits(q).0,
            Gate::Y(q) => {
                let (x, z) = self.bits(q);
                self.neg ^= x ^ z;
            }
            Gate::Cx(c, t) => {
                let (xc, zc) = self.bits(c);
                let (xt, zt) = self.bits(t);
                self.neg ^= xc & zt & !(xt ^ zc);
                self.set(t, xt ^ xc, zt);
                self.set(c, xc, zc ^ zt);
            }
            Gate::Cz(a, b) => {
                self.conj(Gate::H(b));
                self.conj(Gate::Cx(a, b));
                self.conj(Gate::H(b));
            }
        }
    }
}

/// Gates on qubits >= i mapping p to ±X_i and q to ±Z_i under conjugation.
/// Requires p, q supported on qubits >= i and anticommuting.
fn reduce_pair(n: usize, i: usize, p: PauliString, q: PauliString) -> Vec<Gate> {
    let mut rp = Row { n, v: p.x_mask(), w: p.z_mask(), neg: false };
    let mut rq = Row { n, v: q.x_mask(), w: q.z_mask(), neg: false };
    let mut gates = Vec::new();
    let mut push = |g: Gate, rp: &mut Row, rq: &mut Row| {
        rp.conj(g);
        rq.conj(g);
        gates.push(g);
    };
    // p -> X-only
    for k in i..n {
        match rp.bits(k) {
            (false, true) => push(Gate::H(k), &mut rp, &mut rq),
            (true, true) => push(Gate::S(k), &mut rp, &mut rq),
            _ => {}
        }
    }
    if !rp.bits(i).0 {
        let k = (i + 1..n).find(|&k| rp.bits(k).0).expect("p is not the identity");
        push(Gate::Cx(k, i), &mut rp, &mut rq);
    }
    for k in i + 1..n {
        if rp.bits(k).0 {
            push(Gate::Cx(i, k), &mut rp, &mut rq);
        }
    }
    // p = X_i, so q has a Z component on qubit i
    push(Gate::H(i), &mut rp, &mut rq);
    for k in i + 1..n {
        match rq.bits(k) {
            (false, true) => push(Gate::H(k), &mut rp, &mut rq),
            (true, true) => push(Gate::S(k), &mut rp, &mut rq),
            _ => {}
        }
    }
    for k in i + 1..n {
        if rq.bits(k).0 {
            push(Gate::Cx(i, k), &mut rp, &mut rq);
        }
    }
    if rq.bits(i).1 {
        push(Gate::S(i), &mut rp, &mut rq);
    }
    push(Gate::H(i), &mut rp, &mut rq);
    debug_assert_eq!((rp.v, rp.w), (1 << (n - 1 - i), 0));
    debug_assert_eq!((rq.v, rq.w), (0, 1 << (n - 1 - i)));
    gates
}

/// Uniformly random n-qubit Clifford.
pub fn random_clifford<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Clifford {
    Clifford::random(n, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::pauli_matrix;
    use crate::rng::rng_from_seed;
    use crate::state::C64;
    use nalgebra::DMatrix;

    fn unitary(c: &Clifford) -> DMatrix<C64> {
        let d = 1 << c.num_qubits();
        let mut u = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
        for col in 0..d {
            let mut s = PureState::basis(c.num_qubits(), col).unwrap();
            c.apply(&mut s).unwrap();
            for (r, a) in s.amplitudes().iter().enumerate() {
                u[(r, col)] = *a;
            }
        }
        u
    }

    #[test]
    fn tableau_conjugation_matches_dense() {
        let mut rng = rng_from_seed(11);
        for n in 1..=3 {
            for _ in 0..20 {
                let c = Clifford::random(n, &mut rng);
                let u = unitary(&c);
                for idx in 0..(1usize << (2 * n)) {
                    let p = PauliString::from_index(n, idx);
                    let got = c.conjugate(&p).unwrap();
                    let lhs = &u * pauli_matrix(&p).unwrap() * u.adjoint();
                    let sign = if got.negative { -1.0 } else { 1.0 };
                    let rhs = pauli_matrix(&got.pauli).unwrap() * C64::new(sign, 0.0);
                    assert!((lhs - rhs).norm() < 1e-10, "n={n} p={p}");
                }
            }
        }
    }
}
