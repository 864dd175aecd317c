//! The experiment drivers behind each subcommand.

use std::io::Write;
use std::time::Instant;

use bellpauli::{
    adapted_ancestral_samples, adapted_sampler_law, bell_sample, empirical, greedy_ordering_from_data,
    pauli_distribution, run_asymmetric, run_symmetric, tv_distance, Aggregator, MarginalEstimator, OrderingChoice,
    Party, PartyId, PauliString, PureState, QubitOrdering, RunDiagnostics, SamplerMode, SeedStream, Shots, StateKind,
    StateRecipe,
};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, ProtocolName};
use crate::error::Result;
use crate::results::{ResultRow, RowKind};

/// Exact-distribution TV is reported up to this many qubits.
pub const TV_ORACLE_QUBITS: usize = bellpauli::sampler::MAX_LAW_QUBITS;

/// One protocol run between fresh parties holding `rho` and `sigma`.
#[allow(clippy::too_many_arguments)]
fn protocol_estimate(
    rho: &PureState,
    sigma: &PureState,
    mode: &SamplerMode,
    proto: ProtocolName,
    n1: usize,
    n2: u64,
    n_rho: u64,
    n_sigma: u64,
    lambda: f64,
    aggregator: Aggregator,
    seeds: SeedStream,
) -> Result<f64> {
    let mut alice = Party::new(PartyId::Alice, rho.clone(), mode.clone(), seeds);
    let mut bob = Party::new(PartyId::Bob, sigma.clone(), mode.clone(), seeds);
    let r = match proto {
        ProtocolName::Symmetric => run_symmetric(&mut alice, &mut bob, n1, Shots::Finite(n2), aggregator)?,
        ProtocolName::Asymmetric => {
            run_asymmetric(&mut alice, &mut bob, n1, Shots::Finite(n_rho), Shots::Finite(n_sigma), lambda, aggregator)?
        }
    };
    Ok(r.estimate)
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Trial rows in grid order, each group followed by its summary row.
fn with_summaries(rows: Vec<ResultRow>, group: usize) -> Vec<ResultRow> {
    let mut out = Vec::with_capacity(rows.len() + rows.len() / group.max(1));
    for chunk in rows.chunks(group.max(1)) {
        out.extend_from_slice(chunk);
        out.push(ResultRow::summarize(chunk));
    }
    out
}

/// rho = sigma = t-doped states over t x N2 x protocol x trial. State for
/// trial i is shared by every grid point, so grid points differ only in the
/// varied parameter and the protocol randomness.
pub fn fig_sweep(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let sweep = cfg.sweep()?;
    let root = SeedStream::new(cfg.seed);
    let mut jobs = vec![];
    for &t in &sweep.t_values {
        for &n2 in &sweep.n2_values {
            for &proto in &sweep.protocols {
                for trial in 0..cfg.trials {
                    jobs.push((t, n2, proto, trial));
                }
            }
        }
    }
    let rows = jobs
        .par_iter()
        .map(|&(t, n2, proto, trial)| {
            let start = Instant::now();
            let recipe = StateRecipe::new(StateKind::TDoped { n: sweep.n, t }, root.child("state", trial).root());
            let state = recipe.build()?;
            let truth = state.overlap(&state)?;
            let seeds = root.child(&format!("run/t={t}/n2={n2}/{}", proto.as_str()), trial);
            let estimate = protocol_estimate(
                &state,
                &state,
                &cfg.sampler,
                proto,
                sweep.n1,
                n2,
                n2,
                n2,
                sweep.lambda,
                Aggregator::Mean,
                seeds,
            )?;
            Ok(ResultRow {
                row_kind: RowKind::Trial,
                experiment: cfg.experiment.clone(),
                protocol: proto.as_str().into(),
                recipe: recipe.tag(),
                trial: Some(trial),
                seed: Some(seeds.root()),
                n: sweep.n,
                t: Some(t),
                n1: Some(sweep.n1),
                n2: Some(n2),
                lambda: (proto == ProtocolName::Asymmetric).then_some(sweep.lambda),
                estimate: Some(estimate),
                truth: Some(truth),
                abs_error: Some((estimate - truth).abs()),
                stddev: None,
                runtime_ms: Some(elapsed_ms(start)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(with_summaries(rows, cfg.trials as usize))
}

fn t_count(kind: &StateKind) -> Option<usize> {
    match kind {
        StateKind::TDoped { t, .. } => Some(*t),
        _ => None,
    }
}

/// Protocol runs on the configured rho and sigma, `trials` times per protocol.
pub fn ip_run(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let pc = cfg.protocol()?;
    let root = SeedStream::new(cfg.seed);
    let rho_recipe = StateRecipe::new(cfg.rho()?.clone(), root.child("rho", 0).root());
    let sigma_recipe = StateRecipe::new(cfg.sigma()?.clone(), root.child("sigma", 0).root());
    let rho = rho_recipe.build()?;
    // identical recipes give identical states
    let sigma = if cfg.sigma.is_none() { rho.clone() } else { sigma_recipe.build()? };
    let truth = rho.overlap(&sigma)?;
    let recipe_tag =
        if cfg.sigma.is_none() { rho_recipe.tag() } else { format!("{}|{}", rho_recipe.tag(), sigma_recipe.tag()) };
    let jobs: Vec<(ProtocolName, u64)> =
        pc.protocols.iter().flat_map(|p| (0..cfg.trials).map(move |i| (*p, i))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(proto, trial)| {
            let start = Instant::now();
            let seeds = root.child(&format!("run/{}", proto.as_str()), trial);
            let estimate = protocol_estimate(
                &rho,
                &sigma,
                &cfg.sampler,
                proto,
                pc.n1,
                pc.n2,
                pc.n_rho.unwrap_or(pc.n2),
                pc.n_sigma.unwrap_or(pc.n2),
                pc.lambda,
                pc.aggregator(),
                seeds,
            )?;
            Ok(ResultRow {
                row_kind: RowKind::Trial,
                experiment: cfg.experiment.clone(),
                protocol: proto.as_str().into(),
                recipe: recipe_tag.clone(),
                trial: Some(trial),
                seed: Some(seeds.root()),
                n: rho.num_qubits(),
                t: t_count(&rho_recipe.kind),
                n1: Some(pc.n1),
                n2: Some(pc.n2),
                lambda: (proto == ProtocolName::Asymmetric).then_some(pc.lambda),
                estimate: Some(estimate),
                truth: Some(truth),
                abs_error: Some((estimate - truth).abs()),
                stddev: None,
                runtime_ms: Some(elapsed_ms(start)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(with_summaries(rows, cfg.trials as usize))
}

#[derive(Clone, Debug)]
pub struct PauliSampleReport {
    pub n: usize,
    pub n_bell: usize,
    pub ordering: QubitOrdering,
    pub samples: Vec<PauliString>,
    pub diagnostics: RunDiagnostics,
    /// Empirical TV to the exact distribution when n <= `TV_ORACLE_QUBITS`.
    pub tv: Option<f64>,
    /// TV between the sampler's exact output law and the exact distribution
    /// (no output-sampling noise), same range of n.
    pub law_tv: Option<f64>,
}

impl PauliSampleReport {
    /// One sample per line: 2n-bit label and its letter form.
    pub fn write_samples<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for s in &self.samples {
            writeln!(w, "{} {}", s.bit_string(), s.letters())?;
        }
        Ok(())
    }

    pub fn summary(&self) -> String {
        let d = &self.diagnostics;
        format!(
            "n={} N_bell={} N_out={} ordering={} tv={} law_tv={} deterministic_steps={} degenerate_steps={} zero_sum_steps={} flagged_samples={}",
            self.n,
            self.n_bell,
            self.samples.len(),
            self.ordering,
            self.tv.map_or("na".to_string(), |t| format!("{t:.6}")),
            self.law_tv.map_or("na".to_string(), |t| format!("{t:.6}")),
            d.deterministic_steps,
            d.degenerate_steps,
            d.zero_sum_steps,
            d.flagged_samples,
        )
    }
}

/// Bell data on the configured rho, then adapted ancestral sampling.
/// `ordering` overrides the config's choice.
pub fn pauli_sample(cfg: &ExperimentConfig, ordering: Option<OrderingChoice>) -> Result<PauliSampleReport> {
    let sc = cfg.sample()?;
    let root = SeedStream::new(cfg.seed);
    let state = StateRecipe::new(cfg.rho()?.clone(), root.child("rho", 0).root()).build()?;
    let n = state.num_qubits();
    let data = bell_sample(&state, sc.n_bell, &mut root.rng("bell", 0))?;
    let ord = match ordering.unwrap_or_else(|| sc.ordering.clone()) {
        OrderingChoice::Identity => QubitOrdering::identity(n),
        OrderingChoice::Interleaved => QubitOrdering::interleaved(n)?,
        OrderingChoice::Explicit(p) => QubitOrdering::new(p)?,
        OrderingChoice::Greedy => {
            greedy_ordering_from_data(&MarginalEstimator::new(&data, QubitOrdering::identity(n))?)
        }
    };
    let est = MarginalEstimator::new(&data, ord.clone())?;
    let (samples, mut diagnostics) = adapted_ancestral_samples(&est, sc.n_out, &mut root.rng("sample", 0))?;
    let (tv, law_tv) = if n <= TV_ORACLE_QUBITS {
        let exact = pauli_distribution(&state)?;
        let p = exact.probabilities();
        (Some(tv_distance(&empirical(n, &samples), p)), Some(tv_distance(&adapted_sampler_law(&est)?, p)))
    } else {
        (None, None)
    };
    diagnostics.tv_to_exact = tv;
    Ok(PauliSampleReport { n, n_bell: sc.n_bell, ordering: ord, samples, diagnostics, tv, law_tv })
}
