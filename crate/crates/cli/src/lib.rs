//! Experiment configs, CSV results and the drivers behind the `xpcli` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod lemmas;
pub mod results;

pub use commands::{fig_sweep, ip_run, pauli_sample, PauliSampleReport};
pub use config::{ExperimentConfig, ProtocolConfig, ProtocolName, SampleConfig, SweepConfig};
pub use error::{CliError, ConfigError, Result};
pub use lemmas::{run_all as lemma_suite, LemmaCheck};
pub use results::{digest, read_csv, write_csv, ResultRow, RowKind, COLUMNS, SCHEMA_VERSION};
