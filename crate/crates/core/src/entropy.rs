//! Entropies, stabilizer Renyi entropies, Schmidt ranks, CDF and imaginarity.

use serde::{Deserialize, Serialize};

use crate::distribution::{pauli_distribution, PauliDistribution};
use crate::error::{invalid, Result};
use crate::marginals::reshape;
use crate::state::PureState;

/// A probability counts as support iff it exceeds this.
pub const SUPPORT_TOL: f64 = 1e-10;
/// Singular values below this times the largest are treated as zero.
pub const RANK_TOL: f64 = 1e-10;
/// Slack on the strict comparison alpha^2 < tau, absorbing float dust on
/// exactly representable values such as alpha^2 = 1/2.
pub const CDF_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchmidtRank {
    pub rank: usize,
    /// log2 of the rank.
    pub s0: f64,
}

/// Schmidt rank across `subset_a` | rest.
pub fn schmidt_rank(state: &PureState, subset_a: &[usize]) -> Result<SchmidtRank> {
    let n = state.num_qubits();
    let mut sorted = subset_a.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != subset_a.len() || sorted.iter().any(|q| *q >= n) {
        return invalid("subset must be distinct qubits in range");
    }
    if sorted.is_empty() || sorted.len() == n {
        return invalid("subset must be nonempty and proper");
    }
    let m = reshape(state, &sorted);
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let rank = sv.iter().filter(|s| **s > RANK_TOL * max).count();
    Ok(SchmidtRank { rank, s0: (rank as f64).log2() })
}

/// Renyi entropy in bits. alpha = 0 counts support, alpha = 1 is Shannon,
/// alpha = infinity is the min-entropy.
pub fn renyi_entropy(probs: &[f64], alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0) {
        return invalid(format!("Renyi order must be >= 0, got {alpha}"));
    }
    let supp = probs.iter().filter(|p| **p > SUPPORT_TOL);
    Ok(if alpha == 0.0 {
        (supp.count() as f64).log2()
    } else if alpha == 1.0 {
        -supp.map(|p| p * p.log2()).sum::<f64>()
    } else if alpha.is_infinite() {
        -probs.iter().cloned().fold(0.0, f64::max).log2()
    } else {
        supp.map(|p| p.powf(alpha)).sum::<f64>().log2() / (1.0 - alpha)
    })
}

/// M_alpha = H_alpha(p_psi) - n.
pub fn stabilizer_entropy(dist: &PauliDistribution, alpha: f64) -> Result<f64> {
    Ok(renyi_entropy(dist.probabilities(), alpha)? - dist.num_qubits() as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    /// (alpha, H_alpha(p_psi)).
    pub renyi_alpha: Vec<(f64, f64)>,
    /// (alpha, M_alpha).
    pub stabilizer_m: Vec<(f64, f64)>,
    /// S0 across {0..k} | rest for k = 1..n-1.
    pub schmidt_s0: Vec<f64>,
}

impl EntropyReport {
    pub fn m(&self, alpha: f64) -> Option<f64> {
        self.stabilizer_m.iter().find(|(a, _)| *a == alpha).map(|(_, m)| *m)
    }
}

pub fn entropies(state: &PureState, alphas: &[f64]) -> Result<EntropyReport> {
    let dist = pauli_distribution(state)?;
    entropies_from(state, &dist, alphas)
}

pub fn entropies_from(state: &PureState, dist: &PauliDistribution, alphas: &[f64]) -> Result<EntropyReport> {
    let n = state.num_qubits() as f64;
    let mut renyi = Vec::with_capacity(alphas.len());
    for &a in alphas {
        renyi.push((a, renyi_entropy(dist.probabilities(), a)?));
    }
    let stabilizer_m = renyi.iter().map(|(a, h)| (*a, h - n)).collect();
    let cuts = state.num_qubits().saturating_sub(1);
    let schmidt_s0 = (1..=cuts)
        .map(|k| schmidt_rank(state, &(0..k).collect::<Vec<_>>()).map(|r| r.s0))
        .collect::<Result<Vec<_>>>()?;
    Ok(EntropyReport { renyi_alpha: renyi, stabilizer_m, schmidt_s0 })
}

/// F(tau) = sum of p(x) over labels with alpha(x)^2 < tau.
pub fn cdf(state: &PureState, tau: f64) -> Result<f64> {
    cdf_from(&pauli_distribution(state)?, tau)
}

pub fn cdf_from(dist: &PauliDistribution, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return invalid(format!("CDF threshold must be positive, got {tau}"));
    }
    Ok(dist
        .probabilities()
        .iter()
        .enumerate()
        .filter(|(i, _)| dist.alpha_sq(*i) < tau - CDF_SLACK)
        .map(|(_, p)| p)
        .sum())
}

/// |<psi|psi*>|^2.
pub fn transpose_overlap(state: &PureState) -> f64 {
    // <psi|psi*> = sum_u conj(psi_u)^2
    state.amplitudes().iter().map(|a| a * a).sum::<crate::state::C64>().norm_sqr()
}

/// I(psi) = 1 - |<psi|psi*>|^2.
pub fn imaginarity(state: &PureState) -> f64 {
    1.0 - transpose_overlap(state)
}
