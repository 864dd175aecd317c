//! Dense pure states and in-place gate application.

use crate::error::{guard, invalid, Error, Result};
use crate::pauli::PauliString;
use num_complex::Complex64;

/// Largest n for which a dense state vector is built.
pub const MAX_DENSE_QUBITS: usize = 24;
pub const NORM_TOL: f64 = 1e-10;

pub type C64 = Complex64;

/// Amplitude vector of length 2^n. Index bit `n - 1 - q` holds qubit q.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n: usize,
    amps: Vec<C64>,
}

impl PureState {
    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        guard(n, MAX_DENSE_QUBITS)?;
        if index >= 1 << n {
            return invalid("basis index out of range");
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// Checked constructor: length must be a power of two and the norm 1 within 1e-10.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let s = Self::from_unnormalized_raw(amps)?;
        let ns = s.norm_sqr();
        if (ns - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(ns));
        }
        Ok(s)
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        let mut s = Self::from_unnormalized_raw(amps)?;
        let ns = s.norm_sqr();
        if ns <= 0.0 || !ns.is_finite() {
            return Err(Error::NotNormalized(ns));
        }
        let k = 1.0 / ns.sqrt();
        s.amps.iter_mut().for_each(|a| *a *= k);
        Ok(s)
    }

    fn from_unnormalized_raw(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return invalid("amplitude vector length must be a power of two");
        }
        let n = len.trailing_zeros() as usize;
        guard(n, MAX_DENSE_QUBITS)?;
        Ok(Self { n, amps })
    }

    /// Product of single-qubit states given as characters:
    /// `0`, `1`, `+`, `-`, `i` (= |0> + i|1>), `T` (= |0> + e^{i pi/4}|1>).
    pub fn product(qubits: &str) -> Result<Self> {
        let mut s = PureState { n: 0, amps: vec![C64::new(1.0, 0.0)] };
        for c in qubits.chars() {
            s = s.tensor(&single_qubit(c)?)?;
        }
        if s.n == 0 {
            return invalid("empty product string");
        }
        Ok(s)
    }

    /// Haar-random state: i.i.d. complex Gaussian amplitudes, normalized.
    pub fn haar_random<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        use rand_distr::{Distribution, StandardNormal};
        guard(n, MAX_DENSE_QUBITS)?;
        let amps = (0..1usize << n)
            .map(|_| C64::new(StandardNormal.sample(&mut *rng), StandardNormal.sample(&mut *rng)))
            .collect();
        Self::normalized(amps)
    }

    /// |T> = (|0> + e^{i pi/4}|1>)/sqrt 2.
    pub fn t_state() -> Self {
        single_qubit('T').unwrap()
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// <self|other>.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        self.check_same(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// |<self|other>|^2 = tr(rho sigma) for pure states.
    pub fn overlap(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Entrywise complex conjugate in the computational basis.
    pub fn conj(&self) -> PureState {
        PureState { n: self.n, amps: self.amps.iter().map(|a| a.conj()).collect() }
    }

    /// self ⊗ other; self's qubits come first.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let n = self.n + other.n;
        guard(n, MAX_DENSE_QUBITS)?;
        let mut amps = Vec::with_capacity(1 << n);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(PureState { n, amps })
    }

    pub(crate) fn check_same(&self, other: &PureState) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        Ok(())
    }

    fn bit(&self, q: usize) -> usize {
        assert!(q < self.n, "qubit {q} out of range for n = {}", self.n);
        1 << (self.n - 1 - q)
    }

    /// Applies the 2x2 matrix [[m00, m01], [m10, m11]] to qubit q.
    pub fn apply_1q(&mut self, q: usize, m: [[C64; 2]; 2]) {
        let b = self.bit(q);
        for i in 0..self.amps.len() {
            if i & b == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | b]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | b] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub fn h(&mut self, q: usize) {
        let r = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        self.apply_1q(q, [[r, r], [r, -r]]);
    }

    fn phase(&mut self, q: usize, ph: C64) {
        let b = self.bit(q);
        self.amps.iter_mut().enumerate().filter(|(i, _)| i & b != 0).for_each(|(_, a)| *a *= ph);
    }

    pub fn s(&mut self, q: usize) {
        self.phase(q, C64::new(0.0, 1.0));
    }

    pub fn sdg(&mut self, q: usize) {
        self.phase(q, C64::new(0.0, -1.0));
    }

    pub fn t(&mut self, q: usize) {
        self.phase(q, C64::from_polar(1.0, std::f64::consts::FRAC_PI_4));
    }

    pub fn z(&mut self, q: usize) {
        self.phase(q, C64::new(-1.0, 0.0));
    }

    pub fn x(&mut self, q: usize) {
        let b = self.bit(q);
        for i in 0..self.amps.len() {
            if i & b == 0 {
                self.amps.swap(i, i | b);
            }
        }
    }

    pub fn y(&mut self, q: usize) {
        // Y = i X Z
        self.z(q);
        self.x(q);
        self.amps.iter_mut().for_each(|a| *a *= C64::new(0.0, 1.0));
    }

    pub fn cnot(&mut self, c: usize, t: usize) {
        assert_ne!(c, t);
        let (bc, bt) = (self.bit(c), self.bit(t));
        for i in 0..self.amps.len() {
            if i & bc != 0 && i & bt == 0 {
                self.amps.swap(i, i | bt);
            }
        }
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        assert_ne!(a, b);
        let (ba, bb) = (self.bit(a), self.bit(b));
        self.amps.iter_mut().enumerate().filter(|(i, _)| i & ba != 0 && i & bb != 0).for_each(|(_, x)| *x = -*x);
    }

    /// psi <- P_x psi with P_x = i^{v.w} X^v Z^w, by index permutation and signs.
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        if p.num_qubits() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: p.num_qubits() });
        }
        let (v, w) = (p.x_mask() as usize, p.z_mask() as usize);
        let ph = i_pow(p.y_count());
        let old = std::mem::take(&mut self.amps);
        let mut out = vec![C64::new(0.0, 0.0); old.len()];
        for (u, a) in old.into_iter().enumerate() {
            let sign = if (w & u).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            out[u ^ v] = ph * a * sign;
        }
        self.amps = out;
        Ok(())
    }
}

/// i^k.
pub fn i_pow(k: u32) -> C64 {
    match k % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

fn single_qubit(c: char) -> Result<PureState> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let (a, b) = match c {
        '0' => (C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
        '1' => (C64::new(0.0, 0.0), C64::new(1.0, 0.0)),
        '+' => (C64::new(r, 0.0), C64::new(r, 0.0)),
        '-' => (C64::new(r, 0.0), C64::new(-r, 0.0)),
        'i' => (C64::new(r, 0.0), C64::new(0.0, r)),
        'T' | 't' => (C64::new(r, 0.0), C64::from_polar(r, std::f64::consts::FRAC_PI_4)),
        other => return invalid(format!("unknown single-qubit state {other:?}")),
    };
    Ok(PureState { n: 1, amps: vec![a, b] })
}
