//! Qubit orderings.
//!
//! Convention shared by every marginal and sampler in the crate: a prefix of
//! m bits refers to the Pauli label read in ordering pi, i.e. the bit string
//! (v_{pi(1)}, w_{pi(1)}, v_{pi(2)}, w_{pi(2)}, ...) truncated to m bits.
//! Qubits are 0-based here; pi(k) is `ordering.qubit(k - 1)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::pauli::PauliString;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QubitOrdering {
    perm: Vec<usize>,
}

impl QubitOrdering {
    pub fn identity(n: usize) -> Self {
        Self { perm: (0..n).collect() }
    }

    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &q in &perm {
            if q >= perm.len() || seen[q] {
                return invalid(format!("{perm:?} is not a permutation"));
            }
            seen[q] = true;
        }
        Ok(Self { perm })
    }

    /// For n = 2m Bell pairs (i, m + i): 0, m, 1, m + 1, ...
    pub fn interleaved(n: usize) -> Result<Self> {
        if !n.is_multiple_of(2) {
            return invalid("interleaved ordering needs even n");
        }
        let m = n / 2;
        Self::new((0..m).flat_map(|i| [i, m + i]).collect())
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// Qubit at position k (0-based).
    pub fn qubit(&self, k: usize) -> usize {
        self.perm[k]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, q)| i == *q)
    }

    /// Label bits in this ordering.
    pub fn label_bits(&self, p: &PauliString) -> Vec<u8> {
        self.perm
            .iter()
            .flat_map(|&q| {
                let (a, b) = p.qubit_bits(q);
                [a as u8, b as u8]
            })
            .collect()
    }

    /// Inverse of `label_bits` for a full 2n-bit string.
    pub fn label_from_bits(&self, bits: &[u8]) -> Result<PauliString> {
        let n = self.perm.len();
        if bits.len() != 2 * n {
            return invalid("label must have 2n bits");
        }
        let (mut v, mut w) = (0u64, 0u64);
        for (k, &q) in self.perm.iter().enumerate() {
            let s = n - 1 - q;
            v |= (bits[2 * k] as u64 & 1) << s;
            w |= (bits[2 * k + 1] as u64 & 1) << s;
        }
        PauliString::new(n, v, w)
    }
}

impl fmt::Debug for QubitOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QubitOrdering({:?})", self.perm)
    }
}

impl fmt::Display for QubitOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.perm.iter().map(|q| q.to_string()).collect();
        f.write_str(&s.join(","))
    }
}

impl FromStr for QubitOrdering {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let perm = s
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(perm)
    }
}
