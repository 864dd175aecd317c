//! State families used as inputs and fixtures, plus Pauli noise.

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::clifford::Clifford;
use crate::distribution::{all_expectations, PauliDistribution};
use crate::error::{invalid, Error, Result};
use crate::pauli::PauliString;
use crate::rng::SeedStream;
use crate::state::{PureState, C64};

/// C (|T>^t ⊗ |0>^{n-t}) for a uniformly random Clifford C.
pub fn make_t_doped<R: Rng + ?Sized>(n: usize, t: usize, rng: &mut R) -> Result<PureState> {
    let c = Clifford::random(n, rng);
    make_t_doped_with(n, t, &c)
}

/// Same as `make_t_doped` with the Clifford supplied by the caller.
pub fn make_t_doped_with(n: usize, t: usize, clifford: &Clifford) -> Result<PureState> {
    if n == 0 || t > n {
        return invalid(format!("need 0 <= t <= n and n >= 1, got t = {t}, n = {n}"));
    }
    let qubits: String = (0..n).map(|q| if q < t { 'T' } else { '0' }).collect();
    let mut s = PureState::product(&qubits)?;
    clifford.apply(&mut s)?;
    Ok(s)
}

/// |S|^{-1/2} sum_{x in S} (-1)^{f(x)} |x> with S uniform of the given size and f fair coins.
pub fn make_subset_phase<R: Rng + ?Sized>(n: usize, subset_size: usize, rng: &mut R) -> Result<PureState> {
    let d = 1usize << n;
    if subset_size == 0 || subset_size > d {
        return invalid(format!("subset size {subset_size} outside 1..=2^{n}"));
    }
    let mut subset = rand::seq::index::sample(rng, d, subset_size).into_vec();
    subset.sort_unstable();
    let signs: Vec<bool> = (0..subset_size).map(|_| rng.random()).collect();
    make_subset_phase_with(n, &subset, &signs)
}

/// Subset phase state from an explicit subset and sign bits (true = minus).
pub fn make_subset_phase_with(n: usize, subset: &[usize], minus: &[bool]) -> Result<PureState> {
    let d = 1usize << n;
    if subset.is_empty() || subset.len() != minus.len() {
        return invalid("subset and sign lists must be nonempty and equally long");
    }
    let a = 1.0 / (subset.len() as f64).sqrt();
    let mut amps = vec![C64::new(0.0, 0.0); d];
    for (&x, &m) in subset.iter().zip(minus) {
        if x >= d || amps[x].re != 0.0 {
            return invalid("subset entries must be distinct basis indices");
        }
        amps[x] = C64::new(if m { -a } else { a }, 0.0);
    }
    PureState::from_amplitudes(amps)
}

/// sqrt(1-eps) e^{i theta}|0>|0^n> + sqrt(eps)|1>|psi> on n + 1 qubits; the new qubit comes first.
pub fn make_tilted(base: &PureState, eps: f64, theta: f64) -> Result<PureState> {
    if !(eps > 0.0 && eps < 1.0) {
        return invalid(format!("epsilon must lie in (0, 1), got {eps}"));
    }
    let d = base.dim();
    let mut amps = vec![C64::new(0.0, 0.0); 2 * d];
    amps[0] = C64::from_polar((1.0 - eps).sqrt(), theta);
    let r = eps.sqrt();
    for (u, a) in base.amplitudes().iter().enumerate() {
        amps[d + u] = a * r;
    }
    PureState::from_amplitudes(amps)
}

/// Normalized sqrt(tau)|0^n> + sqrt(1-tau)|+^n>.
pub fn make_phi_tau(n: usize, tau: f64) -> Result<PureState> {
    let m = phi_tau_m(n, tau);
    if !(tau > 0.0 && tau <= 0.5) || !(2.0 * m < tau) {
        return invalid(format!("phi_tau needs tau in (0, 1/2] and 2 sqrt(tau(1-tau)/2^n) < tau, got tau = {tau}"));
    }
    let d = 1usize << n;
    let plus = (1.0 - tau).sqrt() / (d as f64).sqrt();
    let mut amps = vec![C64::new(plus, 0.0); d];
    amps[0] += tau.sqrt();
    PureState::normalized(amps)
}

/// m = sqrt(tau(1-tau)/2^n); the normalization is K = 1 + 2m.
pub fn phi_tau_m(n: usize, tau: f64) -> f64 {
    (tau * (1.0 - tau) / (1u64 << n) as f64).sqrt()
}

/// Bell pairs on qubits (i, n/2 + i).
pub fn make_bell_pairs(n: usize) -> Result<PureState> {
    if n == 0 || !n.is_multiple_of(2) {
        return invalid(format!("Bell pairs need even n >= 2, got {n}"));
    }
    let mut s = PureState::zero(n)?;
    for i in 0..n / 2 {
        s.h(i);
        s.cnot(i, n / 2 + i);
    }
    Ok(s)
}

/// CZ over the edges of a k x k grid (row-major qubits) applied to |+>^{k^2}.
pub fn make_cluster2d(side: usize) -> Result<PureState> {
    if side == 0 {
        return invalid("cluster side must be positive");
    }
    let n = side * side;
    let mut s = PureState::zero(n)?;
    for q in 0..n {
        s.h(q);
    }
    for r in 0..side {
        for c in 0..side {
            let q = r * side + c;
            if c + 1 < side {
                s.cz(q, q + 1);
            }
            if r + 1 < side {
                s.cz(q, q + side);
            }
        }
    }
    Ok(s)
}

/// (⊗_i C_i)|psi> with each C_i uniform over the 24 single-qubit Cliffords.
pub fn make_local_clifford_rotated<R: Rng + ?Sized>(base: &PureState, rng: &mut R) -> Result<PureState> {
    let mut s = base.clone();
    Clifford::random_local(base.num_qubits(), rng).apply(&mut s)?;
    Ok(s)
}

/// p_rho for rho = Lambda(sigma): (transfer(P) alpha_sigma(P))^2 / (2^n tr rho^2).
pub fn noisy_pauli_distribution(sigma: &PureState, channel: &PauliNoiseChannel) -> Result<PauliDistribution> {
    let n = sigma.num_qubits();
    if channel.num_qubits() != n {
        return Err(Error::DimensionMismatch { expected: n, got: channel.num_qubits() });
    }
    let alphas = all_expectations(sigma)?;
    let d = (1usize << n) as f64;
    let mut probs: Vec<f64> = alphas
        .iter()
        .enumerate()
        .map(|(idx, a)| (channel.transfer(&PauliString::from_index(n, idx)) * a).powi(2) / d)
        .collect();
    let purity: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|x| *x /= purity);
    PauliDistribution::from_probabilities(n, probs)
}

/// Pauli channel: P_y rho P_y with probability xi_y, identity otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliNoiseChannel {
    n: usize,
    rates: Vec<(PauliString, f64)>,
}

impl PauliNoiseChannel {
    pub fn new(n: usize, rates: Vec<(PauliString, f64)>) -> Result<Self> {
        for (p, r) in &rates {
            if p.num_qubits() != n {
                return Err(Error::DimensionMismatch { expected: n, got: p.num_qubits() });
            }
            if p.is_identity() {
                return invalid("identity is not an error term");
            }
            if !(*r >= 0.0) {
                return invalid(format!("negative rate {r}"));
            }
        }
        let ch = Self { n, rates };
        if ch.total() > 1.0 + 1e-12 {
            return invalid(format!("total error rate {} exceeds 1", ch.total()));
        }
        Ok(ch)
    }

    pub fn noiseless(n: usize) -> Self {
        Self { n, rates: Vec::new() }
    }

    /// Uniform depolarizing-style channel: each nonidentity Pauli at rate xi / (4^n - 1).
    pub fn uniform(n: usize, xi: f64) -> Result<Self> {
        let count = (1usize << (2 * n)) - 1;
        let r = xi / count as f64;
        Self::new(n, (1..=count).map(|i| (PauliString::from_index(n, i), r)).collect())
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn rates(&self) -> &[(PauliString, f64)] {
        &self.rates
    }

    /// xi = sum of all error rates.
    pub fn total(&self) -> f64 {
        self.rates.iter().map(|(_, r)| r).sum()
    }

    /// Pauli transfer eigenvalue: tr(Lambda(rho) P) = transfer(P) tr(rho P).
    pub fn transfer(&self, p: &PauliString) -> f64 {
        let mut f = 1.0 - self.total();
        for (e, q) in &self.rates {
            f += if e.commutes_with(p) { *q } else { -*q };
        }
        f
    }

    /// Draws the error for one copy; `None` means no error.
    pub fn sample_error<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<PauliString> {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (p, r) in &self.rates {
            acc += r;
            if u < acc {
                return Some(*p);
            }
        }
        None
    }
}

/// One copy of Lambda(sigma) as a pure state: sigma, or P_y sigma with probability xi_y.
pub fn sample_noisy_copy<R: Rng + ?Sized>(
    sigma: &PureState,
    channel: &PauliNoiseChannel,
    rng: &mut R,
) -> Result<PureState> {
    if channel.num_qubits() != sigma.num_qubits() {
        return Err(Error::DimensionMismatch { expected: sigma.num_qubits(), got: channel.num_qubits() });
    }
    let mut s = sigma.clone();
    if let Some(p) = channel.sample_error(rng) {
        s.apply_pauli(&p)?;
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateKind {
    /// Characters from `0 1 + - i T`, one per qubit.
    Product {
        qubits: String,
    },
    TDoped {
        n: usize,
        t: usize,
    },
    SubsetPhase {
        n: usize,
        subset_size: usize,
    },
    Tilted {
        base: Box<StateKind>,
        epsilon: f64,
        theta: f64,
    },
    BellPairs {
        n: usize,
    },
    Cluster2d {
        side: usize,
    },
    PhiTau {
        n: usize,
        tau: f64,
    },
    LocalCliffordRotated {
        base: Box<StateKind>,
    },
}

/// Declarative state description; recipe plus seed fix the amplitudes bit for bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateRecipe {
    pub seed: u64,
    #[serde(flatten)]
    pub kind: StateKind,
}

impl StateRecipe {
    pub fn new(kind: StateKind, seed: u64) -> Self {
        Self { seed, kind }
    }

    pub fn build(&self) -> Result<PureState> {
        build_kind(&self.kind, &SeedStream::new(self.seed), 0)
    }

    /// Short tag for CSV rows, e.g. `t_doped(n=10,t=2)`.
    pub fn tag(&self) -> String {
        kind_tag(&self.kind)
    }

    /// Hex SHA-256 of the canonical JSON form, truncated to 16 characters.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("recipe serializes");
        hex::encode(Sha256::digest(json.as_bytes()))[..16].to_string()
    }
}

fn kind_tag(k: &StateKind) -> String {
    match k {
        StateKind::Product { qubits } => format!("product({qubits})"),
        StateKind::TDoped { n, t } => format!("t_doped(n={n};t={t})"),
        StateKind::SubsetPhase { n, subset_size } => format!("subset_phase(n={n};s={subset_size})"),
        StateKind::Tilted { base, epsilon, theta } => format!("tilted({};eps={epsilon};theta={theta})", kind_tag(base)),
        StateKind::BellPairs { n } => format!("bell_pairs(n={n})"),
        StateKind::Cluster2d { side } => format!("cluster2d(k={side})"),
        StateKind::PhiTau { n, tau } => format!("phi_tau(n={n};tau={tau})"),
        StateKind::LocalCliffordRotated { base } => format!("rotated({})", kind_tag(base)),
    }
}

fn build_kind(k: &StateKind, seeds: &SeedStream, depth: u64) -> Result<PureState> {
    let mut rng = seeds.rng("state", depth);
    match k {
        StateKind::Product { qubits } => PureState::product(qubits),
        StateKind::TDoped { n, t } => make_t_doped(*n, *t, &mut rng),
        StateKind::SubsetPhase { n, subset_size } => make_subset_phase(*n, *subset_size, &mut rng),
        StateKind::Tilted { base, epsilon, theta } => {
            make_tilted(&build_kind(base, seeds, depth + 1)?, *epsilon, *theta)
        }
        StateKind::BellPairs { n } => make_bell_pairs(*n),
        StateKind::Cluster2d { side } => make_cluster2d(*side),
        StateKind::PhiTau { n, tau } => make_phi_tau(*n, *tau),
        StateKind::LocalCliffordRotated { base } => {
            make_local_clifford_rotated(&build_kind(base, seeds, depth + 1)?, &mut rng)
        }
    }
}
