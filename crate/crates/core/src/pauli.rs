//! Phaseless n-qubit Pauli labels.
//!
//! A label is the bit string x = (v1, w1, ..., vn, wn) and stands for the
//! Hermitian operator i^{v.w} X^v Z^w. Internally `v` and `w` are masks in
//! the same layout as amplitude indices: qubit q (0-based, qubit 0 is the
//! leftmost tensor factor) lives at bit `n - 1 - q`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub const MAX_LABEL_QUBITS: usize = 31;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliString {
    n: usize,
    v: u64,
    w: u64,
}

impl PauliString {
    pub fn new(n: usize, v: u64, w: u64) -> Result<Self> {
        if n > MAX_LABEL_QUBITS {
            return Err(Error::TooManyQubits { n, limit: MAX_LABEL_QUBITS });
        }
        let mask = low_mask(n);
        if v & !mask != 0 || w & !mask != 0 {
            return invalid("Pauli mask has bits beyond n");
        }
        Ok(Self { n, v, w })
    }

    pub(crate) fn from_masks(n: usize, v: u64, w: u64) -> Self {
        debug_assert!(v & !low_mask(n) == 0 && w & !low_mask(n) == 0);
        Self { n, v, w }
    }

    pub fn identity(n: usize) -> Self {
        Self { n, v: 0, w: 0 }
    }

    /// Single-qubit Pauli `letter` on qubit `q`, identity elsewhere.
    pub fn single(n: usize, q: usize, letter: char) -> Result<Self> {
        if q >= n {
            return invalid(format!("qubit {q} out of range for n = {n}"));
        }
        let (a, b) = letter_bits(letter)?;
        let bit = 1u64 << (n - 1 - q);
        Self::new(n, if a { bit } else { 0 }, if b { bit } else { 0 })
    }

    /// From the interleaved bit string (v1, w1, ..., vn, wn).
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if !bits.len().is_multiple_of(2) {
            return invalid("Pauli bit string must have even length");
        }
        let n = bits.len() / 2;
        let (mut v, mut w) = (0u64, 0u64);
        for q in 0..n {
            let (a, b) = (bits[2 * q], bits[2 * q + 1]);
            if a > 1 || b > 1 {
                return invalid("bits must be 0 or 1");
            }
            v |= (a as u64) << (n - 1 - q);
            w |= (b as u64) << (n - 1 - q);
        }
        Self::new(n, v, w)
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.n)
            .flat_map(|q| {
                let (a, b) = self.qubit_bits(q);
                [a as u8, b as u8]
            })
            .collect()
    }

    /// Dense index `(v << n) | w`, used by `PauliDistribution`.
    pub fn index(&self) -> usize {
        ((self.v << self.n) | self.w) as usize
    }

    pub fn from_index(n: usize, idx: usize) -> Self {
        let idx = idx as u64;
        Self::from_masks(n, idx >> n, idx & low_mask(n))
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.v
    }

    pub fn z_mask(&self) -> u64 {
        self.w
    }

    /// (v_q, w_q) for qubit q.
    pub fn qubit_bits(&self, q: usize) -> (bool, bool) {
        let s = self.n - 1 - q;
        ((self.v >> s) & 1 == 1, (self.w >> s) & 1 == 1)
    }

    /// Two-bit digit 2 v_q + w_q: 0 = I, 1 = Z, 2 = X, 3 = Y.
    pub fn digit(&self, q: usize) -> u8 {
        let (a, b) = self.qubit_bits(q);
        ((a as u8) << 1) | b as u8
    }

    pub fn letter(&self, q: usize) -> char {
        ['I', 'Z', 'X', 'Y'][self.digit(q) as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.v == 0 && self.w == 0
    }

    pub fn weight(&self) -> u32 {
        (self.v | self.w).count_ones()
    }

    /// Number of Y factors, i.e. v.w.
    pub fn y_count(&self) -> u32 {
        (self.v & self.w).count_ones()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.v & other.w).count_ones() + (self.w & other.v).count_ones()).is_multiple_of(2)
    }

    /// Label of the product up to phase (bitwise XOR of labels).
    pub fn xor(&self, other: &PauliString) -> Result<PauliString> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        Ok(Self::from_masks(self.n, self.v ^ other.v, self.w ^ other.w))
    }

    /// Sign picked up under transposition: (-1)^{#Y}.
    pub fn transpose_sign(&self) -> i8 {
        if self.y_count().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Bit-string rendering (v1 w1 ... vn wn).
    pub fn bit_string(&self) -> String {
        self.to_bits().iter().map(|b| if *b == 1 { '1' } else { '0' }).collect()
    }

    pub fn letters(&self) -> String {
        (0..self.n).map(|q| self.letter(q)).collect()
    }

    pub fn from_letters(s: &str) -> Result<Self> {
        let n = s.chars().count();
        let (mut v, mut w) = (0u64, 0u64);
        for (q, c) in s.chars().enumerate() {
            let (a, b) = letter_bits(c)?;
            let bit = 1u64 << (n - 1 - q);
            if a {
                v |= bit;
            }
            if b {
                w |= bit;
            }
        }
        Self::new(n, v, w)
    }
}

/// Parity of the number of Y factors as ±1.
pub fn transpose_sign(p: &PauliString) -> i8 {
    p.transpose_sign()
}

pub(crate) fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn letter_bits(c: char) -> Result<(bool, bool)> {
    match c.to_ascii_uppercase() {
        'I' => Ok((false, false)),
        'Z' => Ok((false, true)),
        'X' => Ok((true, false)),
        'Y' => Ok((true, true)),
        other => invalid(format!("unknown Pauli letter {other:?}")),
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.letters())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({})", self.letters())
    }
}

impl FromStr for PauliString {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if !s.is_empty() && s.chars().all(|c| c == '0' || c == '1') {
            let bits: Vec<u8> = s.bytes().map(|b| b - b'0').collect();
            Self::from_bits(&bits)
        } else {
            Self::from_letters(s)
        }
    }
}
