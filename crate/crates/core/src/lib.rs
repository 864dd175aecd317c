//! Pauli sampling from Bell-measurement data on dense state vectors, and the
//! two-party inner-product estimation protocols built on it.

// `!(x >= 0.0)` style checks are there to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bell;
pub mod clifford;
pub mod distribution;
pub mod entropy;
pub mod error;
pub mod factory;
pub mod marginals;
pub mod ordering;
pub mod pauli;
pub mod protocol;
pub mod rng;
pub mod sampler;
pub mod state;

pub use bell::{
    bell_sample, bell_sample_noisy, describe, eigenvalue_tables, hoeffding_epsilon, BellDataset, BellOutcomeSampler,
    MarginalEstimator, M_TABLE, S_VECTOR,
};
pub use clifford::{random_clifford, Clifford, Gate, SignedPauli};
pub use distribution::{
    all_expectations, bell_outcome_distribution, expectation, pauli_distribution, pauli_matrix, PauliDistribution,
};
pub use entropy::{
    cdf, cdf_from, entropies, entropies_from, imaginarity, renyi_entropy, schmidt_rank, stabilizer_entropy,
    transpose_overlap, EntropyReport, SchmidtRank,
};
pub use error::{Error, Result};
pub use factory::{
    make_bell_pairs, make_cluster2d, make_local_clifford_rotated, make_phi_tau, make_subset_phase,
    make_subset_phase_with, make_t_doped, make_t_doped_with, make_tilted, noisy_pauli_distribution, sample_noisy_copy,
    PauliNoiseChannel, StateKind, StateRecipe,
};
pub use marginals::{exact_marginal, BitMarginals, ExactPauliMarginals, MarginalTable, PauliMarginals};
pub use ordering::QubitOrdering;
pub use pauli::{transpose_sign, PauliString};
pub use protocol::{
    estimate_imaginarity_from_samples, g, imaginarity_sample_count, measure_outcomes, measure_pauli, run_asymmetric,
    run_symmetric, s_lambda, Aggregator, ClassicalChannel, Message, OrderingChoice, Party, PartyId, Payload,
    ProtocolKind, ProtocolResult, SamplerMode, Shots,
};
pub use rng::{rng_from_seed, Rng, SeedStream};
pub use sampler::{
    adapted_ancestral_sample, adapted_ancestral_samples, adapted_sampler_law, ancestral_bits, bell_difference_sample,
    bell_difference_samples, empirical, exact_pauli_sample, greedy_ordering, greedy_ordering_from_data,
    path_entanglement, tv_distance, ExactPauliSampler, PathEntanglementReport, RunDiagnostics, SampleDiagnostics,
};
pub use state::{PureState, C64};
