//! Two-party inner-product estimation with local simulation and classical
//! messages only.
//!
//! Each `Party` owns its state privately; the protocol runners talk to a
//! party only through methods returning classical data, and everything that
//! crosses between the parties is appended to a `ClassicalChannel`.

use std::cell::Cell;
use std::fmt;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bell::{bell_sample, BellOutcomeSampler, MarginalEstimator};
use crate::distribution::expectation;
use crate::error::{invalid, Error, Result};
use crate::ordering::QubitOrdering;
use crate::pauli::PauliString;
use crate::rng::{Rng as StreamRng, SeedStream};
use crate::sampler::{adapted_ancestral_sample, greedy_ordering_from_data, ExactPauliSampler, RunDiagnostics};
use crate::state::PureState;

/// G(u, v) = (u + v)^2 / (2 (u^2 + v^2)).
pub fn g(u: f64, v: f64) -> Result<f64> {
    let d = u * u + v * v;
    if d == 0.0 {
        return Err(Error::GDomain);
    }
    Ok(0.5 * (u + v) * (u + v) / d)
}

/// s_lambda(z): z if |z| > lambda, else sign(z) lambda with sign(0) = +.
pub fn s_lambda(z: f64, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return invalid(format!("lambda must be positive, got {lambda}"));
    }
    Ok(if z.abs() > lambda {
        z
    } else if z < 0.0 {
        -lambda
    } else {
        lambda
    })
}

/// Samples needed for the imaginarity estimate: 2 (eps - Delta)^{-2} ln(2/delta).
pub fn imaginarity_sample_count(eps: f64, delta_tv: f64, delta: f64) -> Result<usize> {
    if !(eps > delta_tv && delta > 0.0 && delta < 1.0) {
        return invalid("need eps > Delta and delta in (0, 1)");
    }
    Ok((2.0 / (eps - delta_tv).powi(2) * (2.0 / delta).ln()).ceil() as usize)
}

/// I hat = 1 - mean transpose sign.
pub fn estimate_imaginarity_from_samples(samples: &[PauliString]) -> Result<f64> {
    if samples.is_empty() {
        return invalid("no samples");
    }
    let mean = samples.iter().map(|p| p.transpose_sign() as f64).sum::<f64>() / samples.len() as f64;
    Ok(1.0 - mean)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PartyId {
    Alice,
    Bob,
}

impl fmt::Display for PartyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PartyId::Alice => "alice",
            PartyId::Bob => "bob",
        })
    }
}

/// How a party produces Pauli samples from its own state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SamplerMode {
    /// Exact draws from p_rho.
    Exact,
    /// Adapted ancestral sampling over one Bell dataset of `n_bell` outcomes.
    AncestralFromBell { n_bell: usize, ordering: OrderingChoice },
    /// One Bell outcome per sample; exact for real states only.
    BellDirect,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderingChoice {
    Identity,
    Interleaved,
    /// Greedy, from the party's own Bell data.
    Greedy,
    Explicit(Vec<usize>),
}

/// Measurement budget per Pauli.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Shots {
    Finite(u64),
    /// Use the exact expectation (test hook).
    Exact,
}

enum LocalSampler {
    Exact(ExactPauliSampler),
    Ancestral(Box<MarginalEstimator>),
    Direct(BellOutcomeSampler),
}

/// One protocol participant with private state and private randomness.
pub struct Party {
    id: PartyId,
    state: PureState,
    mode: SamplerMode,
    sampler: Option<LocalSampler>,
    sample_rng: StreamRng,
    measure_rng: StreamRng,
    bell_rng: StreamRng,
    coin_rng: StreamRng,
    state_reads: Cell<u64>,
    diagnostics: RunDiagnostics,
}

impl Party {
    pub fn new(id: PartyId, state: PureState, mode: SamplerMode, seeds: SeedStream) -> Self {
        let tag = id.to_string();
        Self {
            id,
            state,
            mode,
            sampler: None,
            sample_rng: seeds.rng(&format!("{tag}/sample"), 0),
            measure_rng: seeds.rng(&format!("{tag}/measure"), 0),
            bell_rng: seeds.rng(&format!("{tag}/bell"), 0),
            coin_rng: seeds.rng(&format!("{tag}/coins"), 0),
            state_reads: Cell::new(0),
            diagnostics: RunDiagnostics::default(),
        }
    }

    pub fn id(&self) -> PartyId {
        self.id
    }

    pub fn num_qubits(&self) -> usize {
        self.state.num_qubits()
    }

    /// Number of local operations that touched this party's amplitudes.
    pub fn state_reads(&self) -> u64 {
        self.state_reads.get()
    }

    pub fn sampler_diagnostics(&self) -> &RunDiagnostics {
        &self.diagnostics
    }

    fn touch(&self) -> &PureState {
        self.state_reads.set(self.state_reads.get() + 1);
        &self.state
    }

    fn ensure_sampler(&mut self) -> Result<()> {
        if self.sampler.is_some() {
            return Ok(());
        }
        let sampler = match self.mode.clone() {
            SamplerMode::Exact => LocalSampler::Exact(ExactPauliSampler::new(self.touch())?),
            SamplerMode::BellDirect => {
                let s = self.touch().clone();
                LocalSampler::Direct(BellOutcomeSampler::new(&s, &s)?)
            }
            SamplerMode::AncestralFromBell { n_bell, ordering } => {
                let s = self.touch().clone();
                let data = bell_sample(&s, n_bell, &mut self.bell_rng)?;
                let n = s.num_qubits();
                let ord = match ordering {
                    OrderingChoice::Identity => QubitOrdering::identity(n),
                    OrderingChoice::Interleaved => QubitOrdering::interleaved(n)?,
                    OrderingChoice::Explicit(p) => QubitOrdering::new(p)?,
                    OrderingChoice::Greedy => {
                        greedy_ordering_from_data(&MarginalEstimator::new(&data, QubitOrdering::identity(n))?)
                    }
                };
                LocalSampler::Ancestral(Box::new(MarginalEstimator::new(&data, ord)?))
            }
        };
        self.sampler = Some(sampler);
        Ok(())
    }

    /// `k` Pauli samples from this party's own (approximate) Pauli distribution.
    pub fn sample_paulis(&mut self, k: usize) -> Result<Vec<PauliString>> {
        self.ensure_sampler()?;
        let mut out = Vec::with_capacity(k);
        for _ in 0..k {
            let p = match self.sampler.as_ref().unwrap() {
                LocalSampler::Exact(s) => s.sample(&mut self.sample_rng),
                LocalSampler::Direct(s) => s.sample(&mut self.sample_rng),
                LocalSampler::Ancestral(est) => {
                    let (p, d) = adapted_ancestral_sample(est.as_ref(), &mut self.sample_rng)?;
                    self.diagnostics.record(&d);
                    p
                }
            };
            out.push(p);
        }
        Ok(out)
    }

    /// Estimate of tr(rho P) from `shots` measurements of P.
    pub fn measure(&mut self, p: &PauliString, shots: Shots) -> Result<f64> {
        let alpha = expectation(self.touch(), p)?;
        match shots {
            Shots::Exact => Ok(alpha),
            Shots::Finite(n) => measure_outcomes(alpha, n, &mut self.measure_rng),
        }
    }

    fn coin(&mut self) -> bool {
        self.coin_rng.random()
    }
}

/// Mean of `shots` ±1 outcomes with P(+1) = (1 + alpha)/2.
pub fn measure_outcomes<R: Rng + ?Sized>(alpha: f64, shots: u64, rng: &mut R) -> Result<f64> {
    if shots == 0 {
        return invalid("shots must be at least 1");
    }
    let p = ((1.0 + alpha) / 2.0).clamp(0.0, 1.0);
    let plus = Binomial::new(shots, p).map_err(|e| Error::InvalidArgument(e.to_string()))?.sample(rng);
    Ok((2.0 * plus as f64 - shots as f64) / shots as f64)
}

/// Measurement of P on the party's state.
pub fn measure_pauli(party: &mut Party, p: &PauliString, shots: Shots) -> Result<f64> {
    party.measure(p, shots)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Payload {
    PauliList(Vec<PauliString>),
    EstimateList(Vec<f64>),
    Scalar(f64),
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::PauliList(_) => "pauli_list",
            Payload::EstimateList(_) => "estimate_list",
            Payload::Scalar(_) => "scalar",
        }
    }

    /// SHA-256 over a canonical byte encoding (labels as bit strings, reals as IEEE bits).
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.kind().as_bytes());
        match self {
            Payload::PauliList(ps) => {
                for p in ps {
                    h.update(p.bit_string().as_bytes());
                    h.update(b";");
                }
            }
            Payload::EstimateList(xs) => xs.iter().for_each(|x| h.update(x.to_bits().to_le_bytes())),
            Payload::Scalar(x) => h.update(x.to_bits().to_le_bytes()),
        }
        hex::encode(h.finalize())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub from: PartyId,
    pub to: PartyId,
    pub payload: Payload,
}

/// Append-only log of classical messages.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassicalChannel {
    log: Vec<Message>,
}

impl ClassicalChannel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a message and hands the payload to the recipient.
    pub fn send(&mut self, from: PartyId, to: PartyId, payload: Payload) -> &Payload {
        self.log.push(Message { from, to, payload });
        &self.log.last().unwrap().payload
    }

    pub fn messages(&self) -> &[Message] {
        &self.log
    }

    /// One line per message: `from->to<TAB>kind<TAB>items<TAB>sha256`.
    pub fn transcript(&self) -> String {
        let mut s = String::new();
        for m in &self.log {
            let items = match &m.payload {
                Payload::PauliList(v) => v.len(),
                Payload::EstimateList(v) => v.len(),
                Payload::Scalar(_) => 1,
            };
            s.push_str(&format!("{}->{}\t{}\t{}\t{}\n", m.from, m.to, m.payload.kind(), items, m.payload.digest()));
        }
        s
    }
}

/// How N1 per-sample values are combined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub enum Aggregator {
    #[default]
    Mean,
    MedianOfMeans {
        groups: usize,
    },
}

impl Aggregator {
    pub fn apply(&self, xs: &[f64]) -> f64 {
        match *self {
            Aggregator::Mean => xs.iter().sum::<f64>() / xs.len() as f64,
            Aggregator::MedianOfMeans { groups } => {
                let g = groups.clamp(1, xs.len());
                let size = xs.len() / g;
                let mut means: Vec<f64> =
                    (0..g).map(|i| xs[i * size..(i + 1) * size].iter().sum::<f64>() / size as f64).collect();
                means.sort_by(|a, b| a.total_cmp(b));
                if g % 2 == 1 {
                    means[g / 2]
                } else {
                    0.5 * (means[g / 2 - 1] + means[g / 2])
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ProtocolKind {
    Symmetric,
    Asymmetric,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProtocolResult {
    pub kind: ProtocolKind,
    /// Estimate of tr(rho sigma).
    pub estimate: f64,
    /// Symmetric only: f hat in [0, 1].
    pub f_hat: Option<f64>,
    pub n1: usize,
    /// Symmetric: shared N2; asymmetric: (N_rho, N_sigma).
    pub shots: (Shots, Shots),
    pub lambda: Option<f64>,
    /// Pairs (0, 0) replaced by G = 1/2.
    pub zero_pairs: usize,
    pub transcript: ClassicalChannel,
    #[serde(skip)]
    pub wall_clock: Duration,
}

/// Symmetric protocol. Each of the N1 samples comes from Alice's or Bob's
/// sampler by a fair coin (Alice's coins); both measure every sample with
/// N2 shots; Alice averages G(alpha_rho, alpha_sigma) and reports 2 f - 1.
pub fn run_symmetric(
    alice: &mut Party,
    bob: &mut Party,
    n1: usize,
    n2: Shots,
    aggregator: Aggregator,
) -> Result<ProtocolResult> {
    let start = Instant::now();
    check_pair(alice, bob, n1)?;
    let (a, b) = (alice.id(), bob.id());
    let mut ch = ClassicalChannel::new();

    let coins: Vec<bool> = (0..n1).map(|_| alice.coin()).collect();
    let k_bob = coins.iter().filter(|c| **c).count();
    let k_bob = match ch.send(a, b, Payload::Scalar(k_bob as f64)) {
        Payload::Scalar(k) => *k as usize,
        _ => unreachable!(),
    };
    let bob_samples = bob.sample_paulis(k_bob)?;
    let bob_samples = match ch.send(b, a, Payload::PauliList(bob_samples)) {
        Payload::PauliList(v) => v.clone(),
        _ => unreachable!(),
    };
    let alice_samples = alice.sample_paulis(n1 - k_bob)?;
    let (mut ia, mut ib) = (alice_samples.into_iter(), bob_samples.into_iter());
    let list: Vec<PauliString> =
        coins.iter().map(|c| if *c { ib.next() } else { ia.next() }.expect("counts match")).collect();
    let list_for_bob = match ch.send(a, b, Payload::PauliList(list.clone())) {
        Payload::PauliList(v) => v.clone(),
        _ => unreachable!(),
    };

    let bob_est = list_for_bob.iter().map(|p| bob.measure(p, n2)).collect::<Result<Vec<_>>>()?;
    let bob_est = match ch.send(b, a, Payload::EstimateList(bob_est)) {
        Payload::EstimateList(v) => v.clone(),
        _ => unreachable!(),
    };
    let alice_est = list.iter().map(|p| alice.measure(p, n2)).collect::<Result<Vec<_>>>()?;

    let mut zero_pairs = 0;
    let gs: Vec<f64> = alice_est
        .iter()
        .zip(&bob_est)
        .map(|(u, v)| {
            g(*u, *v).unwrap_or_else(|_| {
                zero_pairs += 1;
                0.5
            })
        })
        .collect();
    let f_hat = aggregator.apply(&gs);
    let estimate = 2.0 * f_hat - 1.0;
    ch.send(a, b, Payload::Scalar(estimate));
    Ok(ProtocolResult {
        kind: ProtocolKind::Symmetric,
        estimate,
        f_hat: Some(f_hat),
        n1,
        shots: (n2, n2),
        lambda: None,
        zero_pairs,
        transcript: ch,
        wall_clock: start.elapsed(),
    })
}

/// Asymmetric protocol. Alice samples from her own distribution and sends
/// the labels and her estimates; Bob measures, computes
/// alpha_sigma / s_lambda(alpha_rho) per sample and sends the ratios back;
/// Alice averages.
pub fn run_asymmetric(
    alice: &mut Party,
    bob: &mut Party,
    n1: usize,
    n_rho: Shots,
    n_sigma: Shots,
    lambda: f64,
    aggregator: Aggregator,
) -> Result<ProtocolResult> {
    let start = Instant::now();
    if !(lambda > 0.0 && lambda < 1.0) {
        return invalid(format!("lambda must lie in (0, 1), got {lambda}"));
    }
    check_pair(alice, bob, n1)?;
    let (a, b) = (alice.id(), bob.id());
    let mut ch = ClassicalChannel::new();

    let list = alice.sample_paulis(n1)?;
    let list_for_bob = match ch.send(a, b, Payload::PauliList(list.clone())) {
        Payload::PauliList(v) => v.clone(),
        _ => unreachable!(),
    };
    let alice_est = list.iter().map(|p| alice.measure(p, n_rho)).collect::<Result<Vec<_>>>()?;
    let alice_est_for_bob = match ch.send(a, b, Payload::EstimateList(alice_est)) {
        Payload::EstimateList(v) => v.clone(),
        _ => unreachable!(),
    };
    let ratios = list_for_bob
        .iter()
        .zip(&alice_est_for_bob)
        .map(|(p, ar)| Ok(bob.measure(p, n_sigma)? / s_lambda(*ar, lambda)?))
        .collect::<Result<Vec<_>>>()?;
    let ratios = match ch.send(b, a, Payload::EstimateList(ratios)) {
        Payload::EstimateList(v) => v.clone(),
        _ => unreachable!(),
    };
    let estimate = aggregator.apply(&ratios);
    ch.send(a, b, Payload::Scalar(estimate));
    Ok(ProtocolResult {
        kind: ProtocolKind::Asymmetric,
        estimate,
        f_hat: None,
        n1,
        shots: (n_rho, n_sigma),
        lambda: Some(lambda),
        zero_pairs: 0,
        transcript: ch,
        wall_clock: start.elapsed(),
    })
}

fn check_pair(alice: &Party, bob: &Party, n1: usize) -> Result<()> {
    if alice.num_qubits() != bob.num_qubits() {
        return Err(Error::DimensionMismatch { expected: alice.num_qubits(), got: bob.num_qubits() });
    }
    if alice.id() == bob.id() {
        return invalid("parties must be distinct");
    }
    if n1 == 0 {
        return invalid("N1 must be positive");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_values() {
        assert_eq!(g(0.3, 0.3).unwrap(), 1.0);
        assert_eq!(g(0.3, -0.3).unwrap(), 0.0);
        assert_eq!(g(1.0, 0.0).unwrap(), 0.5);
        assert!(g(0.0, 0.0).is_err());
    }

    #[test]
    fn s_lambda_values() {
        assert_eq!(s_lambda(0.5, 0.1).unwrap(), 0.5);
        assert_eq!(s_lambda(0.05, 0.1).unwrap(), 0.1);
        assert_eq!(s_lambda(-0.05, 0.1).unwrap(), -0.1);
        assert_eq!(s_lambda(0.0, 0.1).unwrap(), 0.1);
        assert!(s_lambda(0.5, 0.0).is_err());
    }

    #[test]
    fn sample_count_formula() {
        // 2 / 0.01 * ln 40 = 737.8
        assert_eq!(imaginarity_sample_count(0.1, 0.0, 0.05).unwrap(), 738);
    }

    #[test]
    fn median_of_means() {
        let xs = [1.0, 1.0, 5.0, 5.0, 2.0, 2.0];
        assert_eq!(Aggregator::MedianOfMeans { groups: 3 }.apply(&xs), 2.0);
        assert_eq!(Aggregator::Mean.apply(&xs), 16.0 / 6.0);
    }
}
