//! Exact marginals of the Pauli distribution and the marginal-oracle traits
//! the ancestral sampler runs on.

use nalgebra::DMatrix;

use crate::distribution::{pauli_distribution, PauliDistribution};
use crate::error::{guard, invalid, Error, Result};
use crate::ordering::QubitOrdering;
use crate::state::{i_pow, PureState, C64};

/// Largest n for which per-level prefix tables (2 * 4^n entries) are built.
pub const MAX_TABLE_QUBITS: usize = 10;

/// Anything that can report (possibly noisy) marginals of a distribution
/// over fixed-length bit strings.
pub trait BitMarginals {
    fn num_bits(&self) -> usize;
    /// Marginal probability of `prefix`; may be negative for estimators.
    fn marginal(&self, prefix: &[u8]) -> Result<f64>;
}

/// Marginals over 2n-bit Pauli labels read in `ordering`.
pub trait PauliMarginals: BitMarginals {
    fn ordering(&self) -> &QubitOrdering;
}

fn check_prefix(prefix: &[u8], max: usize) -> Result<()> {
    if prefix.len() > max {
        return invalid(format!("prefix length {} exceeds {max}", prefix.len()));
    }
    if prefix.iter().any(|b| *b > 1) {
        return invalid("prefix bits must be 0 or 1");
    }
    Ok(())
}

/// p_rho(prefix) in `ordering`, computed from the reduced state:
/// an even prefix of k qubits gives tr(rho_A P_A rho_A P_A) / 2^k, an odd
/// prefix is the sum of its two even extensions.
pub fn exact_marginal(state: &PureState, prefix: &[u8], ordering: &QubitOrdering) -> Result<f64> {
    let n = state.num_qubits();
    if ordering.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: ordering.len() });
    }
    check_prefix(prefix, 2 * n)?;
    if prefix.len() % 2 == 1 {
        let mut ext = prefix.to_vec();
        ext.push(0);
        let a = exact_marginal(state, &ext, ordering)?;
        *ext.last_mut().unwrap() = 1;
        return Ok(a + exact_marginal(state, &ext, ordering)?);
    }
    let k = prefix.len() / 2;
    if k == 0 {
        return Ok(1.0);
    }
    let rho = reduced_density(state, &ordering.as_slice()[..k]);
    let (mut v, mut w) = (0usize, 0usize);
    for j in 0..k {
        let s = k - 1 - j;
        v |= (prefix[2 * j] as usize) << s;
        w |= (prefix[2 * j + 1] as usize) << s;
    }
    let ph = i_pow((v & w).count_ones());
    let d = 1usize << k;
    // (P rho)[a ^ v, c] = ph (-1)^{w.a} rho[a, c]
    let mut prho = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
    for a in 0..d {
        let sign = if (w & a).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        for c in 0..d {
            prho[(a ^ v, c)] = ph * rho[(a, c)] * sign;
        }
    }
    let mut tr = C64::new(0.0, 0.0);
    for a in 0..d {
        for c in 0..d {
            tr += prho[(a, c)] * prho[(c, a)];
        }
    }
    Ok(tr.re / d as f64)
}

/// Reduced density matrix on `subset`; row index bit `k - 1 - j` holds `subset[j]`.
pub fn reduced_density(state: &PureState, subset: &[usize]) -> DMatrix<C64> {
    let m = reshape(state, subset);
    &m * m.adjoint()
}

/// Amplitudes reshaped to a 2^|A| x 2^|B| matrix, A = `subset` in the given
/// order, B = remaining qubits in increasing order.
pub fn reshape(state: &PureState, subset: &[usize]) -> DMatrix<C64> {
    let n = state.num_qubits();
    let k = subset.len();
    let rest: Vec<usize> = (0..n).filter(|q| !subset.contains(q)).collect();
    let mut m = DMatrix::from_element(1 << k, 1 << (n - k), C64::new(0.0, 0.0));
    for (u, amp) in state.amplitudes().iter().enumerate() {
        let bit = |q: usize| (u >> (n - 1 - q)) & 1;
        let a = subset.iter().fold(0usize, |acc, &q| (acc << 1) | bit(q));
        let b = rest.iter().fold(0usize, |acc, &q| (acc << 1) | bit(q));
        m[(a, b)] = *amp;
    }
    m
}

/// Prefix sums of a distribution over m-bit strings, one table per prefix
/// length, for O(1) marginal lookup.
#[derive(Clone, Debug)]
pub struct MarginalTable {
    levels: Vec<Vec<f64>>,
}

impl MarginalTable {
    /// `probs[i]` is the probability of the bit string whose big-endian value is i.
    pub fn from_probs(bits: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1usize << bits {
            return invalid("table length must be 2^bits");
        }
        let mut levels = vec![Vec::new(); bits + 1];
        levels[bits] = probs;
        for m in (0..bits).rev() {
            let next = &levels[m + 1];
            levels[m] = next.chunks_exact(2).map(|c| c[0] + c[1]).collect();
        }
        Ok(Self { levels })
    }

    pub fn num_bits(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn lookup(&self, prefix: &[u8]) -> f64 {
        let idx = prefix.iter().fold(0usize, |acc, b| (acc << 1) | *b as usize);
        self.levels[prefix.len()][idx]
    }

    pub fn full(&self) -> &[f64] {
        self.levels.last().unwrap()
    }
}

impl BitMarginals for MarginalTable {
    fn num_bits(&self) -> usize {
        MarginalTable::num_bits(self)
    }
    fn marginal(&self, prefix: &[u8]) -> Result<f64> {
        check_prefix(prefix, self.num_bits())?;
        Ok(self.lookup(prefix))
    }
}

/// Zero-error marginal oracle for p_rho in a chosen ordering.
#[derive(Clone, Debug)]
pub struct ExactPauliMarginals {
    table: MarginalTable,
    ordering: QubitOrdering,
}

impl ExactPauliMarginals {
    pub fn new(state: &PureState, ordering: QubitOrdering) -> Result<Self> {
        guard(state.num_qubits(), MAX_TABLE_QUBITS)?;
        Self::from_distribution(&pauli_distribution(state)?, ordering)
    }

    pub fn from_distribution(dist: &PauliDistribution, ordering: QubitOrdering) -> Result<Self> {
        let n = dist.num_qubits();
        guard(n, MAX_TABLE_QUBITS)?;
        if ordering.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: ordering.len() });
        }
        let mut permuted = vec![0.0; dist.probabilities().len()];
        for (idx, p) in dist.probabilities().iter().enumerate() {
            permuted[interleave(n, idx, ordering.as_slice())] = *p;
        }
        Ok(Self { table: MarginalTable::from_probs(2 * n, permuted)?, ordering })
    }

    pub fn table(&self) -> &MarginalTable {
        &self.table
    }
}

/// Dense index (v << n) | w -> big-endian value of the label bits in `perm` order.
fn interleave(n: usize, idx: usize, perm: &[usize]) -> usize {
    let (v, w) = (idx >> n, idx & ((1 << n) - 1));
    perm.iter().fold(0usize, |acc, &q| {
        let s = n - 1 - q;
        (acc << 2) | (((v >> s) & 1) << 1) | ((w >> s) & 1)
    })
}

impl BitMarginals for ExactPauliMarginals {
    fn num_bits(&self) -> usize {
        self.table.num_bits()
    }
    fn marginal(&self, prefix: &[u8]) -> Result<f64> {
        self.table.marginal(prefix)
    }
}

impl PauliMarginals for ExactPauliMarginals {
    fn ordering(&self) -> &QubitOrdering {
        &self.ordering
    }
}
