use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use bellpauli::OrderingChoice;
use clap::{Parser, Subcommand};
use xpcli::{lemmas, CliError, ExperimentConfig, Result};

#[derive(Parser)]
#[command(name = "xpcli", about = "Pauli sampling and inner-product estimation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Error and spread of both protocols over t-doped states (CSV).
    FigSweep,
    /// Brute-force lemma checks; exits 1 if any fails.
    LemmaSuite,
    /// Bell data + adapted ancestral sampling; samples to --out, report to stderr.
    PauliSample {
        /// identity, interleaved, greedy, or a comma-separated permutation.
        #[arg(long)]
        ordering: Option<String>,
        #[arg(long)]
        n_bell: Option<usize>,
        #[arg(long)]
        n_out: Option<usize>,
    },
    /// Protocol runs on the configured pair of states (CSV).
    IpRun,
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load(cli: &Cli, fallback: Option<ExperimentConfig>) -> Result<ExperimentConfig> {
    let mut cfg = match (&cli.config, fallback) {
        (Some(p), _) => ExperimentConfig::load(p)?,
        (None, Some(c)) => c,
        (None, None) => {
            return Err(xpcli::ConfigError { line: None, message: "--config is required".into() }.into());
        }
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn parse_ordering(s: &str) -> Result<OrderingChoice> {
    Ok(match s {
        "identity" => OrderingChoice::Identity,
        "interleaved" => OrderingChoice::Interleaved,
        "greedy" => OrderingChoice::Greedy,
        perm => OrderingChoice::Explicit(perm.parse::<bellpauli::QubitOrdering>()?.as_slice().to_vec()),
    })
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::FigSweep => {
            let cfg = load(cli, Some(ExperimentConfig::fig_sweep_default()))?;
            let rows = xpcli::fig_sweep(&cfg)?;
            xpcli::write_csv(output(&cli.out.clone().or(cfg.output.clone()))?, &rows)?;
            eprintln!("rows={} digest={}", rows.len(), xpcli::digest(&rows));
        }
        Command::IpRun => {
            let cfg = load(cli, None)?;
            let rows = xpcli::ip_run(&cfg)?;
            xpcli::write_csv(output(&cli.out.clone().or(cfg.output.clone()))?, &rows)?;
            eprintln!("rows={} digest={}", rows.len(), xpcli::digest(&rows));
        }
        Command::PauliSample { ordering, n_bell, n_out } => {
            let mut cfg = load(cli, None)?;
            if let Some(sc) = cfg.sample.as_mut() {
                sc.n_bell = n_bell.unwrap_or(sc.n_bell);
                sc.n_out = n_out.unwrap_or(sc.n_out);
            }
            let ordering = ordering.as_deref().map(parse_ordering).transpose()?;
            let report = xpcli::pauli_sample(&cfg, ordering)?;
            let mut w = output(&cli.out.clone().or(cfg.output.clone()))?;
            report.write_samples(&mut w)?;
            w.flush()?;
            eprintln!("{}", report.summary());
        }
        Command::LemmaSuite => {
            let seed = match &cli.config {
                Some(_) => load(cli, None)?.seed,
                None => cli.seed.unwrap_or(0),
            };
            let checks = lemmas::run_all(seed)?;
            let mut w = output(&cli.out)?;
            writeln!(w, "{}", lemmas::table_header())?;
            for c in &checks {
                writeln!(w, "{c}")?;
            }
            w.flush()?;
            let failed = checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                return Err(CliError::ChecksFailed(failed));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
