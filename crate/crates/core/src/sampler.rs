//! Ancestral Pauli sampling over marginal oracles, orderings and path
//! entanglement, and the exact and Bell-difference samplers.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bell::MarginalEstimator;
use crate::entropy::schmidt_rank;
use crate::error::{invalid, Result};
use crate::marginals::{BitMarginals, ExactPauliMarginals, PauliMarginals};
use crate::ordering::QubitOrdering;
use crate::pauli::PauliString;
use crate::state::PureState;

/// Per-sample record of the ancestral chain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleDiagnostics {
    /// Steps where exactly one branch estimate was negative.
    pub deterministic_steps: u32,
    /// Steps where both estimates were negative (fair coin, flagged).
    pub degenerate_steps: u32,
    /// Steps where both estimates were exactly zero (fair coin).
    pub zero_sum_steps: u32,
    /// Smallest conditional probability of a chosen branch.
    pub min_conditional: f64,
}

impl Default for SampleDiagnostics {
    fn default() -> Self {
        Self { deterministic_steps: 0, degenerate_steps: 0, zero_sum_steps: 0, min_conditional: 1.0 }
    }
}

impl SampleDiagnostics {
    pub fn flagged(&self) -> bool {
        self.degenerate_steps > 0
    }
}

/// Aggregate over a run; merging is commutative.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunDiagnostics {
    pub samples: u64,
    pub deterministic_steps: u64,
    pub degenerate_steps: u64,
    pub zero_sum_steps: u64,
    pub flagged_samples: u64,
    pub max_deterministic_per_sample: u32,
    pub min_conditional: Option<f64>,
    /// Empirical TV distance to the exact distribution when an oracle exists.
    pub tv_to_exact: Option<f64>,
}

impl RunDiagnostics {
    pub fn record(&mut self, d: &SampleDiagnostics) {
        self.samples += 1;
        self.deterministic_steps += d.deterministic_steps as u64;
        self.degenerate_steps += d.degenerate_steps as u64;
        self.zero_sum_steps += d.zero_sum_steps as u64;
        self.flagged_samples += d.flagged() as u64;
        self.max_deterministic_per_sample = self.max_deterministic_per_sample.max(d.deterministic_steps);
        self.min_conditional = Some(self.min_conditional.map_or(d.min_conditional, |m| m.min(d.min_conditional)));
    }

    pub fn merge(&mut self, other: &RunDiagnostics) {
        self.samples += other.samples;
        self.deterministic_steps += other.deterministic_steps;
        self.degenerate_steps += other.degenerate_steps;
        self.zero_sum_steps += other.zero_sum_steps;
        self.flagged_samples += other.flagged_samples;
        self.max_deterministic_per_sample = self.max_deterministic_per_sample.max(other.max_deterministic_per_sample);
        self.min_conditional = match (self.min_conditional, other.min_conditional) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
    }
}

/// Adapted ancestral sampling of one bit string from (possibly negative)
/// marginal estimates. At each step with a = m(prefix 0), b = m(prefix 1):
/// both nonnegative picks 0 with probability a/(a+b) (fair coin if a+b = 0);
/// exactly one negative takes the other branch; both negative is a fair coin.
pub fn ancestral_bits<M: BitMarginals + ?Sized, R: Rng + ?Sized>(
    oracle: &M,
    rng: &mut R,
) -> Result<(Vec<u8>, SampleDiagnostics)> {
    let len = oracle.num_bits();
    let mut prefix = Vec::with_capacity(len);
    let mut diag = SampleDiagnostics::default();
    for _ in 0..len {
        prefix.push(0);
        let a = oracle.marginal(&prefix)?;
        *prefix.last_mut().unwrap() = 1;
        let b = oracle.marginal(&prefix)?;
        let (bit, cond) = match (a >= 0.0, b >= 0.0) {
            (true, true) if a + b > 0.0 => {
                let p0 = a / (a + b);
                if rng.random::<f64>() < p0 {
                    (0, p0)
                } else {
                    (1, 1.0 - p0)
                }
            }
            (true, true) => {
                diag.zero_sum_steps += 1;
                (rng.random_range(0..2u8), 0.5)
            }
            (true, false) => {
                diag.deterministic_steps += 1;
                (0, 1.0)
            }
            (false, true) => {
                diag.deterministic_steps += 1;
                (1, 1.0)
            }
            (false, false) => {
                diag.degenerate_steps += 1;
                (rng.random_range(0..2u8), 0.5)
            }
        };
        diag.min_conditional = diag.min_conditional.min(cond);
        *prefix.last_mut().unwrap() = bit;
    }
    Ok((prefix, diag))
}

/// One Pauli label from a marginal oracle over 2n-bit labels in its ordering.
pub fn adapted_ancestral_sample<M: PauliMarginals + ?Sized, R: Rng + ?Sized>(
    est: &M,
    rng: &mut R,
) -> Result<(PauliString, SampleDiagnostics)> {
    let (bits, diag) = ancestral_bits(est, rng)?;
    Ok((est.ordering().label_from_bits(&bits)?, diag))
}

/// `count` labels plus aggregated diagnostics.
pub fn adapted_ancestral_samples<M: PauliMarginals + ?Sized, R: Rng + ?Sized>(
    est: &M,
    count: usize,
    rng: &mut R,
) -> Result<(Vec<PauliString>, RunDiagnostics)> {
    let mut run = RunDiagnostics::default();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let (p, d) = adapted_ancestral_sample(est, rng)?;
        run.record(&d);
        out.push(p);
    }
    Ok((out, run))
}

/// Largest n for which `adapted_sampler_law` enumerates the chain.
pub const MAX_LAW_QUBITS: usize = 8;

/// Output law of `adapted_ancestral_sample` over all 4^n labels (indexed by
/// `PauliString::index`), by walking every branch of the chain with the same
/// case split. Coin steps split mass evenly.
pub fn adapted_sampler_law<M: PauliMarginals + ?Sized>(oracle: &M) -> Result<Vec<f64>> {
    let len = oracle.num_bits();
    if len > 2 * MAX_LAW_QUBITS {
        return Err(crate::error::Error::TooManyQubits { n: len / 2, limit: MAX_LAW_QUBITS });
    }
    let mut law = vec![0.0; 1usize << len];
    let mut prefix = Vec::with_capacity(len);
    law_walk(oracle, &mut prefix, 1.0, &mut law)?;
    Ok(law)
}

fn law_walk<M: PauliMarginals + ?Sized>(oracle: &M, prefix: &mut Vec<u8>, mass: f64, law: &mut [f64]) -> Result<()> {
    if mass == 0.0 {
        return Ok(());
    }
    if prefix.len() == oracle.num_bits() {
        law[oracle.ordering().label_from_bits(prefix)?.index()] += mass;
        return Ok(());
    }
    prefix.push(0);
    let a = oracle.marginal(prefix)?;
    *prefix.last_mut().unwrap() = 1;
    let b = oracle.marginal(prefix)?;
    prefix.pop();
    let p0 = match (a >= 0.0, b >= 0.0) {
        (true, true) if a + b > 0.0 => a / (a + b),
        (true, false) => 1.0,
        (false, true) => 0.0,
        _ => 0.5,
    };
    for (bit, p) in [(0u8, p0), (1, 1.0 - p0)] {
        prefix.push(bit);
        law_walk(oracle, prefix, mass * p, law)?;
        prefix.pop();
    }
    Ok(())
}

/// Exact Pauli sampler: ancestral chain over exact prefix tables.
pub struct ExactPauliSampler {
    marginals: ExactPauliMarginals,
}

impl ExactPauliSampler {
    pub fn new(state: &PureState) -> Result<Self> {
        Ok(Self { marginals: ExactPauliMarginals::new(state, QubitOrdering::identity(state.num_qubits()))? })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PauliString {
        let table = self.marginals.table();
        let len = table.num_bits();
        let mut prefix = Vec::with_capacity(len);
        for _ in 0..len {
            prefix.push(0);
            let a = table.lookup(&prefix);
            *prefix.last_mut().unwrap() = 1;
            let b = table.lookup(&prefix);
            let bit = if rng.random::<f64>() * (a + b) < a { 0 } else { 1 };
            *prefix.last_mut().unwrap() = bit;
        }
        self.marginals.ordering().label_from_bits(&prefix).expect("2n bits")
    }
}

/// One exact draw from p_psi. Builds the tables each call; use
/// `ExactPauliSampler` for repeated draws.
pub fn exact_pauli_sample<R: Rng + ?Sized>(state: &PureState, rng: &mut R) -> Result<PauliString> {
    Ok(ExactPauliSampler::new(state)?.sample(rng))
}

/// XOR of two Bell outcomes.
pub fn bell_difference_sample(a: &PauliString, b: &PauliString) -> Result<PauliString> {
    a.xor(b)
}

/// Pairs consecutive outcomes (0,1), (2,3), ... of a dataset.
pub fn bell_difference_samples(outcomes: &[PauliString]) -> Result<Vec<PauliString>> {
    outcomes.chunks_exact(2).map(|c| bell_difference_sample(&c[0], &c[1])).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathEntanglementReport {
    /// S0 of prefixes {pi(1)}, ..., {pi(1..n-1)}.
    pub prefix_s0: Vec<f64>,
    pub e0: f64,
}

pub fn path_entanglement(state: &PureState, ordering: &QubitOrdering) -> Result<PathEntanglementReport> {
    let n = state.num_qubits();
    if n < 2 {
        return invalid("path entanglement needs n >= 2");
    }
    if ordering.len() != n {
        return invalid("ordering length must equal n");
    }
    let prefix_s0 =
        (1..n).map(|k| schmidt_rank(state, &ordering.as_slice()[..k]).map(|r| r.s0)).collect::<Result<Vec<_>>>()?;
    let e0 = prefix_s0.iter().cloned().fold(0.0, f64::max);
    Ok(PathEntanglementReport { prefix_s0, e0 })
}

/// Greedy ordering from the state: repeatedly append the qubit giving the
/// smallest Schmidt rank of the next prefix (ties to the lowest index).
/// Returns the identity unless the result has strictly smaller E0.
pub fn greedy_ordering(state: &PureState) -> Result<QubitOrdering> {
    let n = state.num_qubits();
    if n < 2 {
        return Ok(QubitOrdering::identity(n));
    }
    let mut perm: Vec<usize> = Vec::with_capacity(n);
    while perm.len() < n - 1 {
        let mut best: Option<(usize, usize)> = None;
        for q in (0..n).filter(|q| !perm.contains(q)) {
            let mut trial = perm.clone();
            trial.push(q);
            let r = schmidt_rank(state, &trial)?.rank;
            if best.is_none_or(|(br, _)| r < br) {
                best = Some((r, q));
            }
        }
        perm.push(best.unwrap().1);
    }
    let last = (0..n).find(|q| !perm.contains(q)).expect("one qubit left");
    perm.push(last);
    let greedy = QubitOrdering::new(perm)?;
    let id = QubitOrdering::identity(n);
    if path_entanglement(state, &greedy)?.e0 < path_entanglement(state, &id)?.e0 {
        Ok(greedy)
    } else {
        Ok(id)
    }
}

/// Greedy ordering from Bell data only: append the qubit maximizing the
/// estimated purity of the next prefix (low purity signals entanglement
/// across the cut). Returns the identity unless the smallest prefix purity
/// strictly improves.
pub fn greedy_ordering_from_data(est: &MarginalEstimator) -> QubitOrdering {
    let n = est.num_qubits();
    let min_purity = |perm: &[usize]| (1..n).map(|k| est.subset_purity(&perm[..k])).fold(f64::INFINITY, f64::min);
    let mut perm: Vec<usize> = Vec::with_capacity(n);
    while perm.len() < n {
        let mut best: Option<(f64, usize)> = None;
        for q in (0..n).filter(|q| !perm.contains(q)) {
            let mut trial = perm.clone();
            trial.push(q);
            let p = est.subset_purity(&trial);
            if best.is_none_or(|(bp, _)| p > bp) {
                best = Some((p, q));
            }
        }
        perm.push(best.unwrap().1);
    }
    let id: Vec<usize> = (0..n).collect();
    if n >= 2 && min_purity(&perm) > min_purity(&id) {
        QubitOrdering::new(perm).expect("permutation")
    } else {
        QubitOrdering::identity(n)
    }
}

/// Total variation distance between two tables.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Empirical frequency table of labels, indexed like `PauliDistribution`.
pub fn empirical(n: usize, samples: &[PauliString]) -> Vec<f64> {
    let mut f = vec![0.0; 1usize << (2 * n)];
    let w = 1.0 / samples.len().max(1) as f64;
    for s in samples {
        f[s.index()] += w;
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marginals::MarginalTable;
    use crate::rng::rng_from_seed;

    #[test]
    fn deterministic_branch_on_negative() {
        // m(0) = -0.1, m(1) = 1.1 at the first bit; then fair split
        struct Neg;
        impl BitMarginals for Neg {
            fn num_bits(&self) -> usize {
                1
            }
            fn marginal(&self, p: &[u8]) -> Result<f64> {
                Ok(if p == [0] { -0.1 } else { 1.1 })
            }
        }
        let (bits, d) = ancestral_bits(&Neg, &mut rng_from_seed(0)).unwrap();
        assert_eq!(bits, vec![1]);
        assert_eq!(d.deterministic_steps, 1);
    }

    #[test]
    fn zero_mass_branch_never_taken() {
        let t = MarginalTable::from_probs(2, vec![0.5, 0.0, 0.5, 0.0]).unwrap();
        let mut rng = rng_from_seed(4);
        for _ in 0..200 {
            let (bits, _) = ancestral_bits(&t, &mut rng).unwrap();
            assert_eq!(bits[1], 0);
        }
    }

    #[test]
    fn identical_outcomes_give_identity() {
        let p = PauliString::from_letters("XYZ").unwrap();
        assert!(bell_difference_sample(&p, &p).unwrap().is_identity());
    }
}
