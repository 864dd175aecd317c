//! Brute-force checks of the structural lemmas, one row each.

use std::fmt;

use bellpauli::{
    cdf_from, exact_marginal, make_local_clifford_rotated, make_phi_tau, make_subset_phase, make_t_doped,
    noisy_pauli_distribution, pauli_distribution, schmidt_rank, stabilizer_entropy, transpose_overlap,
    PauliNoiseChannel, PauliString, PureState, QubitOrdering, Rng, SeedStream,
};
use rand::Rng as _;

use crate::error::Result;

/// Number of random probe pairs per Lipschitz check.
pub const LIPSCHITZ_PROBES: usize = 1_000_000;

const TAUS: [f64; 8] = [1e-3, 0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.99];

#[derive(Clone, Debug, PartialEq)]
pub struct LemmaCheck {
    pub name: String,
    /// Worst value seen, in the units of `limit`.
    pub observed: f64,
    pub limit: f64,
    pub passed: bool,
    pub detail: String,
}

impl LemmaCheck {
    fn at_most(name: impl Into<String>, observed: f64, limit: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), observed, limit, passed: observed <= limit, detail: detail.into() }
    }

    fn at_least(name: impl Into<String>, observed: f64, limit: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), observed, limit, passed: observed >= limit, detail: detail.into() }
    }
}

impl fmt::Display for LemmaCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<28} {:>14.6e} {:>14.6e}  {}  {}",
            self.name,
            self.observed,
            self.limit,
            if self.passed { "PASS" } else { "FAIL" },
            self.detail
        )
    }
}

pub fn table_header() -> String {
    format!("{:<28} {:>14} {:>14}  {}  {}", "check", "observed", "limit", "STAT", "detail")
}

/// Runs every check with streams derived from `seed`.
pub fn run_all(seed: u64) -> Result<Vec<LemmaCheck>> {
    let s = SeedStream::new(seed);
    let mut out = vec![schmidt_marginal_bound(&mut s.rng("schmidt", 0))?];
    out.extend(cdf_bounds(&mut s.rng("cdf", 0))?);
    for (i, r) in [0.1, 0.3].into_iter().enumerate() {
        out.push(lipschitz_g(r, LIPSCHITZ_PROBES, &mut s.rng("lipschitz-g", i as u64)));
    }
    for (i, l) in [0.1, 0.3].into_iter().enumerate() {
        out.push(lipschitz_h(l, LIPSCHITZ_PROBES, &mut s.rng("lipschitz-h", i as u64)));
    }
    out.push(noise_pointwise_bound(&mut s.rng("noise", 0))?);
    out.extend(phi_tau_checks()?);
    out.push(imaginarity_gap(6, 200, &mut s.rng("imaginarity", 0))?);
    Ok(out)
}

/// p(x_{1:k}) >= alpha(x)^2 / (2^k r_k) with r_k the Schmidt rank of the
/// first k qubits, over every label, cut and 3 Haar states per n in 2..=5.
pub fn schmidt_marginal_bound(rng: &mut Rng) -> Result<LemmaCheck> {
    let mut worst = f64::INFINITY;
    for n in 2..=5 {
        for _ in 0..3 {
            let s = PureState::haar_random(n, rng)?;
            let d = pauli_distribution(&s)?;
            let id = QubitOrdering::identity(n);
            for k in 1..n {
                let r = schmidt_rank(&s, &(0..k).collect::<Vec<_>>())?.rank as f64;
                for idx in 0..d.probabilities().len() {
                    let bits = id.label_bits(&PauliString::from_index(n, idx));
                    let marg = exact_marginal(&s, &bits[..2 * k], &id)?;
                    worst = worst.min(marg - d.alpha_sq(idx) / ((1u64 << k) as f64 * r));
                }
            }
        }
    }
    Ok(LemmaCheck::at_least("schmidt_marginal_bound", worst, -1e-12, "min p(x_1:k) - alpha^2/(2^k r), n=2..5"))
}

fn cdf_states(rng: &mut Rng) -> Result<Vec<PureState>> {
    let mut states = vec![];
    for n in 1..=6 {
        states.push(PureState::haar_random(n, rng)?);
        for t in 0..=n {
            states.push(make_t_doped(n, t, rng)?);
        }
    }
    Ok(states)
}

/// F(tau) <= 2^{M0} tau and F(tau) <= M1 / log2(1/tau).
pub fn cdf_bounds(rng: &mut Rng) -> Result<Vec<LemmaCheck>> {
    let (mut w0, mut w1) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for s in cdf_states(rng)? {
        let d = pauli_distribution(&s)?;
        let m0 = stabilizer_entropy(&d, 0.0)?;
        let m1 = stabilizer_entropy(&d, 1.0)?;
        for tau in TAUS {
            let f = cdf_from(&d, tau)?;
            w0 = w0.max(f - 2f64.powf(m0) * tau);
            w1 = w1.max(f - m1 / (1.0 / tau).log2());
        }
    }
    Ok(vec![
        LemmaCheck::at_most("cdf_m0_bound", w0, 1e-9, "max F(tau) - 2^M0 tau"),
        LemmaCheck::at_most("cdf_m1_bound", w1, 1e-9, "max F(tau) - M1/log2(1/tau)"),
    ])
}

fn g_fn(x: f64, y: f64) -> f64 {
    0.5 * (x + y) * (x + y) / (x * x + y * y)
}

/// Largest difference quotient of G over random pairs in
/// C_r = {(x, y) in [-1, 1]^2 : x^2 + y^2 >= r^2}.
pub fn lipschitz_g(r: f64, probes: usize, rng: &mut Rng) -> LemmaCheck {
    let mut point = || loop {
        let (x, y): (f64, f64) = (rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
        if x * x + y * y >= r * r {
            return (x, y);
        }
    };
    let mut worst: f64 = 0.0;
    for _ in 0..probes {
        let (p, q) = (point(), point());
        let dist = ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt();
        if dist > 0.0 {
            worst = worst.max((g_fn(p.0, p.1) - g_fn(q.0, q.1)).abs() / dist);
        }
    }
    LemmaCheck::at_most(format!("lipschitz_g r={r}"), worst, 1.0 / r, format!("{probes} probe pairs, limit 1/r"))
}

/// Same for H(x, y) = y / x on C_lambda = {(x, y) in [-1, 1]^2 : x^2 >= lambda^2}.
pub fn lipschitz_h(lambda: f64, probes: usize, rng: &mut Rng) -> LemmaCheck {
    let mut point = || loop {
        let (x, y): (f64, f64) = (rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
        if x * x >= lambda * lambda {
            return (x, y);
        }
    };
    let mut worst: f64 = 0.0;
    for _ in 0..probes {
        let (p, q) = (point(), point());
        let dist = ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt();
        if dist > 0.0 {
            worst = worst.max((p.1 / p.0 - q.1 / q.0).abs() / dist);
        }
    }
    LemmaCheck::at_most(
        format!("lipschitz_h lambda={lambda}"),
        worst,
        2f64.sqrt() / lambda,
        format!("{probes} probe pairs, limit sqrt2/lambda"),
    )
}

/// p_rho(x) >= (1 - 2 xi)^2 p_sigma(x) for rho = Lambda(sigma), by enumeration at n <= 3.
pub fn noise_pointwise_bound(rng: &mut Rng) -> Result<LemmaCheck> {
    let mut worst = f64::INFINITY;
    for n in 1..=3 {
        for _ in 0..30 {
            let sigma = PureState::haar_random(n, rng)?;
            let xi = rng.random_range(0.0..0.25);
            let k = rng.random_range(1..=3);
            let w: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
            let z: f64 = w.iter().sum();
            let rates = w
                .iter()
                .map(|q| (PauliString::from_index(n, rng.random_range(1..1usize << (2 * n))), q * xi / z))
                .collect();
            let ch = PauliNoiseChannel::new(n, rates)?;
            let pr = noisy_pauli_distribution(&sigma, &ch)?;
            let ps = pauli_distribution(&sigma)?;
            let f = (1.0 - 2.0 * ch.total()).powi(2);
            for (a, b) in pr.probabilities().iter().zip(ps.probabilities()) {
                worst = worst.min(a - f * b);
            }
        }
    }
    Ok(LemmaCheck::at_least("noise_pointwise_bound", worst, -1e-12, "min p_rho - (1-2xi)^2 p_sigma, n=1..3"))
}

/// phi_tau at tau = 1/sqrt(n): F(tau^2) <= 2 tau (1 - tau) for n in {4, 9};
/// M0 > n - 1 and M1 > sqrt(n) at n = 9.
pub fn phi_tau_checks() -> Result<Vec<LemmaCheck>> {
    let mut out = vec![];
    for n in [4usize, 9] {
        let tau = 1.0 / (n as f64).sqrt();
        let d = pauli_distribution(&make_phi_tau(n, tau)?)?;
        out.push(LemmaCheck::at_most(
            format!("phi_tau_cdf n={n}"),
            cdf_from(&d, tau * tau)?,
            2.0 * tau * (1.0 - tau),
            "F(tau^2) vs 2 tau(1-tau)",
        ));
        if n == 9 {
            let m0 = stabilizer_entropy(&d, 0.0)?;
            let m1 = stabilizer_entropy(&d, 1.0)?;
            let mut c0 = LemmaCheck::at_least("phi_tau_m0 n=9", m0, (n - 1) as f64, "M0 > n - 1");
            c0.passed = m0 > (n - 1) as f64;
            let mut c1 = LemmaCheck::at_least("phi_tau_m1 n=9", m1, (n as f64).sqrt(), "M1 > sqrt(n)");
            c1.passed = m1 > (n as f64).sqrt();
            out.extend([c0, c1]);
        }
    }
    Ok(out)
}

/// Mean |<psi|psi*>|^2 over locally rotated subset-phase states against (2/3)^n + 5 sd.
pub fn imaginarity_gap(n: usize, samples: usize, rng: &mut Rng) -> Result<LemmaCheck> {
    let vals = (0..samples)
        .map(|_| {
            let base = make_subset_phase(n, 1 << (n - 2), rng)?;
            Ok(transpose_overlap(&make_local_clifford_rotated(&base, rng)?))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean = vals.iter().sum::<f64>() / samples as f64;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
    let limit = (2.0f64 / 3.0).powi(n as i32) + 5.0 * (var / samples as f64).sqrt();
    Ok(LemmaCheck::at_most(format!("imaginarity_gap n={n}"), mean, limit, format!("{samples} rotated states")))
}
