#![allow(dead_code)]

use bellpauli::{PureState, Rng, C64};
use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{ChiSquared, ContinuousCDF};

pub fn random_state(n: usize, rng: &mut Rng) -> PureState {
    let amps = (0..1usize << n)
        .map(|_| {
            let (re, im): (f64, f64) = (StandardNormal.sample(rng), StandardNormal.sample(rng));
            C64::new(re, im)
        })
        .collect();
    PureState::normalized(amps).unwrap()
}

pub fn random_real_state(n: usize, rng: &mut Rng) -> PureState {
    let amps = (0..1usize << n).map(|_| C64::new(StandardNormal.sample(rng), 0.0)).collect();
    PureState::normalized(amps).unwrap()
}

/// Pearson chi-square p-value of `counts` against `probs`, pooling bins with
/// expected count below 5 into one.
pub fn chi2_pvalue(counts: &[u64], probs: &[f64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let (mut stat, mut dof) = (0.0, 0usize);
    let (mut pool_obs, mut pool_exp) = (0.0, 0.0);
    for (c, p) in counts.iter().zip(probs) {
        let e = p * total as f64;
        if e < 5.0 {
            pool_obs += *c as f64;
            pool_exp += e;
            continue;
        }
        stat += (*c as f64 - e).powi(2) / e;
        dof += 1;
    }
    if pool_exp > 0.0 {
        stat += (pool_obs - pool_exp).powi(2) / pool_exp.max(1e-12);
        dof += 1;
    }
    let dof = dof.saturating_sub(1).max(1);
    1.0 - ChiSquared::new(dof as f64).unwrap().cdf(stat)
}

pub fn counts(n: usize, samples: &[bellpauli::PauliString]) -> Vec<u64> {
    let mut c = vec![0u64; 1usize << (2 * n)];
    for s in samples {
        c[s.index()] += 1;
    }
    c
}

pub fn all_prefixes(len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![];
    for m in 0..=len {
        for idx in 0..(1usize << m) {
            out.push((0..m).map(|j| ((idx >> (m - 1 - j)) & 1) as u8).collect());
        }
    }
    out
}

/// Output law of the adapted ancestral chain over all 2^len bit strings
/// (MSB first), by enumeration. Mirrors the case split of `ancestral_bits`.
pub fn sampler_law<M: bellpauli::BitMarginals + ?Sized>(oracle: &M) -> Vec<f64> {
    let len = oracle.num_bits();
    let mut law = vec![0.0; 1usize << len];
    let mut prefix = Vec::with_capacity(len);
    walk(oracle, &mut prefix, 1.0, &mut law);
    law
}

fn walk<M: bellpauli::BitMarginals + ?Sized>(oracle: &M, prefix: &mut Vec<u8>, mass: f64, law: &mut [f64]) {
    if mass == 0.0 {
        return;
    }
    if prefix.len() == oracle.num_bits() {
        let idx = prefix.iter().fold(0usize, |a, b| (a << 1) | *b as usize);
        law[idx] += mass;
        return;
    }
    prefix.push(0);
    let a = oracle.marginal(prefix).unwrap();
    *prefix.last_mut().unwrap() = 1;
    let b = oracle.marginal(prefix).unwrap();
    prefix.pop();
    let p0 = match (a >= 0.0, b >= 0.0) {
        (true, true) if a + b > 0.0 => a / (a + b),
        (true, false) => 1.0,
        (false, true) => 0.0,
        _ => 0.5,
    };
    for (bit, p) in [(0u8, p0), (1, 1.0 - p0)] {
        prefix.push(bit);
        walk(oracle, prefix, mass * p, law);
        prefix.pop();
    }
}

/// Law over bit strings re-indexed as Pauli labels (`PauliString::index`).
pub fn pauli_law<M: bellpauli::PauliMarginals + ?Sized>(oracle: &M) -> Vec<f64> {
    let bits_law = sampler_law(oracle);
    let len = oracle.num_bits();
    let mut out = vec![0.0; bits_law.len()];
    for (i, m) in bits_law.iter().enumerate() {
        let bits: Vec<u8> = (0..len).map(|j| ((i >> (len - 1 - j)) & 1) as u8).collect();
        out[oracle.ordering().label_from_bits(&bits).unwrap().index()] += m;
    }
    out
}

/// Pauli distribution of Lambda(sigma) for a Pauli channel, normalized by its purity.
pub fn noisy_pauli_oracle(sigma: &PureState, ch: &bellpauli::PauliNoiseChannel) -> Vec<f64> {
    let n = sigma.num_qubits();
    let alphas = bellpauli::all_expectations(sigma).unwrap();
    let d = (1usize << n) as f64;
    let mut probs: Vec<f64> = (0..alphas.len())
        .map(|idx| {
            let p = bellpauli::PauliString::from_index(n, idx);
            let mut factor = 1.0 - ch.total();
            for (e, q) in ch.rates() {
                factor += if e.commutes_with(&p) { *q } else { -*q };
            }
            (factor * alphas[idx]).powi(2) / d
        })
        .collect();
    let purity: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|x| *x /= purity);
    probs
}
