//! Experiment configs: one TOML file per run.

use std::path::{Path, PathBuf};

use bellpauli::{Aggregator, OrderingChoice, SamplerMode, StateKind};
use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    /// Root seed; `--seed` overrides it.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default = "default_sampler")]
    pub sampler: SamplerMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<StateKind>,
    /// Defaults to `rho`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<StateKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<ProtocolConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<SampleConfig>,
}

fn default_trials() -> u64 {
    10
}

fn default_sampler() -> SamplerMode {
    SamplerMode::Exact
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolName {
    Symmetric,
    Asymmetric,
}

impl ProtocolName {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProtocolName::Symmetric => "symmetric",
            ProtocolName::Asymmetric => "asymmetric",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggregatorName {
    #[default]
    Mean,
    MedianOfMeans,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    #[serde(default = "both_protocols")]
    pub protocols: Vec<ProtocolName>,
    pub n1: usize,
    /// Shots per Pauli for the symmetric protocol.
    pub n2: u64,
    /// Asymmetric budgets; both default to `n2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_rho: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_sigma: Option<u64>,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default)]
    pub aggregator: AggregatorName,
    #[serde(default = "default_groups")]
    pub groups: usize,
}

impl ProtocolConfig {
    pub fn aggregator(&self) -> Aggregator {
        match self.aggregator {
            AggregatorName::Mean => Aggregator::Mean,
            AggregatorName::MedianOfMeans => Aggregator::MedianOfMeans { groups: self.groups },
        }
    }
}

fn both_protocols() -> Vec<ProtocolName> {
    vec![ProtocolName::Symmetric, ProtocolName::Asymmetric]
}

fn default_lambda() -> f64 {
    0.1
}

fn default_groups() -> usize {
    10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n: usize,
    pub t_values: Vec<usize>,
    pub n2_values: Vec<u64>,
    pub n1: usize,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "both_protocols")]
    pub protocols: Vec<ProtocolName>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    pub n_bell: usize,
    pub n_out: usize,
    #[serde(default = "default_ordering")]
    pub ordering: OrderingChoice,
}

fn default_ordering() -> OrderingChoice {
    OrderingChoice::Identity
}

impl ExperimentConfig {
    /// The numerics grid: n = 10, t in {0, 2, 4, 6}, N2 in {1e2, 1e3, 1e4}, N1 = 1000, 10 seeds.
    pub fn fig_sweep_default() -> Self {
        Self {
            experiment: "fig-sweep".into(),
            seed: 2024,
            trials: 10,
            output: None,
            sampler: SamplerMode::Exact,
            rho: None,
            sigma: None,
            protocol: None,
            sweep: Some(SweepConfig {
                n: 10,
                t_values: vec![0, 2, 4, 6],
                n2_values: vec![100, 1000, 10_000],
                n1: 1000,
                lambda: 0.1,
                protocols: both_protocols(),
            }),
            sample: None,
        }
    }

    pub fn parse(text: &str) -> std::result::Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
            ConfigError { line, message: e.message().to_string() }
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError { line: None, message: format!("{}: {e}", path.display()) })?;
        Ok(Self::parse(&text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn rho(&self) -> std::result::Result<&StateKind, ConfigError> {
        self.rho.as_ref().ok_or_else(|| missing("rho"))
    }

    pub fn sigma(&self) -> std::result::Result<&StateKind, ConfigError> {
        self.sigma.as_ref().map_or_else(|| self.rho(), Ok)
    }

    pub fn protocol(&self) -> std::result::Result<&ProtocolConfig, ConfigError> {
        self.protocol.as_ref().ok_or_else(|| missing("protocol"))
    }

    pub fn sweep(&self) -> std::result::Result<&SweepConfig, ConfigError> {
        self.sweep.as_ref().ok_or_else(|| missing("sweep"))
    }

    pub fn sample(&self) -> std::result::Result<&SampleConfig, ConfigError> {
        self.sample.as_ref().ok_or_else(|| missing("sample"))
    }
}

fn missing(section: &str) -> ConfigError {
    ConfigError { line: None, message: format!("missing [{section}] section") }
}
