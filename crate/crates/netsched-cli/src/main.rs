//! `netsched` — design, verify, and simulate stochastic medium-access
//! schedules for networked control systems.
//!
//! Human-readable progress goes to stderr; the final machine-readable
//! result (JSON, or CSV for `schedule` without `--out`) goes to stdout.
//! Exit codes: 0 on success, 2 when a check, search, or synthesis
//! reports a failure, 1 on usage or IO errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use netsched_cli::commands::{self, ModeChoice};

#[derive(Parser)]
#[command(name = "netsched", version, about = "Stochastic scheduling and control of shared-network plants")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

/// Input selection shared by all configuration-driven subcommands.
#[derive(Args)]
struct SourceArgs {
    /// Path to a JSON run configuration
    #[arg(long, value_name = "FILE", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Name of a built-in preset (batch-reactor, inverted-pendulum, experiment1)
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Frequency-exact schedule: block counts match the target
    /// frequency table exactly
    Exact,
    /// Independent draws from the probability vector at every step
    Iid,
}

impl From<ModeArg> for ModeChoice {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::Exact => ModeChoice::Exact,
            ModeArg::Iid => ModeChoice::Iid,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the standing assumptions on a plant configuration
    Check {
        #[command(flatten)]
        source: SourceArgs,
    },
    /// Verify the stability certificates carried by a configuration
    Verify {
        #[command(flatten)]
        source: SourceArgs,
    },
    /// Design static feedback gains for fixed scheduling parameters
    Synth {
        #[command(flatten)]
        source: SourceArgs,
        /// Positive-definiteness margin for certificate construction
        #[arg(long)]
        kappa: Option<f64>,
        /// Directory for certificates.json
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Search for feasible scheduling parameters on a rational grid
    Search {
        #[command(flatten)]
        source: SourceArgs,
        /// Probability grid step, e.g. 1/10
        #[arg(long, value_name = "RATIONAL")]
        h: Option<String>,
        /// Positive-definiteness margin for certificate construction
        #[arg(long)]
        kappa: Option<f64>,
        /// Wall-clock budget in seconds; exceeding it aborts the search
        #[arg(long, value_name = "SECS")]
        budget_secs: Option<f64>,
        /// Directory for search.json
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Generate a schedule sequence as CSV
    Schedule {
        #[command(flatten)]
        source: SourceArgs,
        /// Sequence generation mode
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
        /// Number of scheduling steps
        #[arg(long)]
        horizon: Option<usize>,
        /// RNG seed
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for schedule.csv (omit to print to stdout)
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Simulate the network and estimate expected truncated costs
    Simulate {
        #[command(flatten)]
        source: SourceArgs,
        /// Sequence generation mode
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
        /// Number of scheduling steps
        #[arg(long)]
        horizon: Option<usize>,
        /// Monte Carlo trials per plant
        #[arg(long)]
        trials: Option<usize>,
        /// RNG seed
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for Monte Carlo trials (or NETSCHED_THREADS)
        #[arg(long)]
        threads: Option<usize>,
        /// Directory for schedule, trajectory, and cost CSVs
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Also write SVG cost plots
        #[arg(long)]
        plot: bool,
    },
    /// Run a packaged end-to-end demonstration
    Demo {
        /// Demonstration name (exp1)
        which: String,
        /// RNG seed
        #[arg(long)]
        seed: Option<u64>,
        /// Number of scheduling steps per run
        #[arg(long)]
        horizon: Option<usize>,
        /// Positive-definiteness margin for certificate construction
        #[arg(long)]
        kappa: Option<f64>,
        /// Output directory (default netsched-out)
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Also write SVG cost plots
        #[arg(long)]
        plot: bool,
    },
    /// Run a packaged scalability benchmark
    Bench {
        /// Benchmark name (exp2)
        which: String,
        /// Number of plants
        #[arg(long, default_value_t = 20)]
        n: usize,
        /// Network capacity
        #[arg(long, default_value_t = 10)]
        m: usize,
        /// Plant state dimension
        #[arg(long, default_value_t = 5)]
        d: usize,
        /// Probability grid step, e.g. 1/10
        #[arg(long, value_name = "RATIONAL")]
        h: Option<String>,
        /// Spectral-radius cap for generated plants
        #[arg(long, default_value_t = 1.05)]
        rho_max: f64,
        /// RNG seed
        #[arg(long)]
        seed: Option<u64>,
        /// Positive-definiteness margin for certificate construction
        #[arg(long)]
        kappa: Option<f64>,
        /// Number of scheduling steps in the validation run
        #[arg(long)]
        horizon: Option<usize>,
        /// Wall-clock budget in seconds for the search phase
        #[arg(long, value_name = "SECS")]
        budget_secs: Option<f64>,
        /// Directory for bench.json and schedule.csv
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.cmd {
        Cmd::Check { source } => {
            let source = commands::resolve_source(&source.config, &source.preset)?;
            commands::check(&source)
        }
        Cmd::Verify { source } => {
            let source = commands::resolve_source(&source.config, &source.preset)?;
            commands::verify(&source)
        }
        Cmd::Synth { source, kappa, out } => {
            let source = commands::resolve_source(&source.config, &source.preset)?;
            commands::synth(&source, kappa, &out)
        }
        Cmd::Search { source, h, kappa, budget_secs, out } => {
            let source = commands::resolve_source(&source.config, &source.preset)?;
            commands::search(&source, &h, kappa, budget_secs, &out)
        }
        Cmd::Schedule { source, mode, horizon, seed, out } => {
            let source = commands::resolve_source(&source.config, &source.preset)?;
            commands::schedule(&source, mode.into(), horizon, seed, &out)
        }
        Cmd::Simulate { source, mode, horizon, trials, seed, threads, out, plot } => {
            let source = commands::resolve_source(&source.config, &source.preset)?;
            commands::simulate(&source, mode.into(), horizon, trials, seed, threads, &out, plot)
        }
        Cmd::Demo { which, seed, horizon, kappa, out, plot } => {
            commands::demo(&which, seed, horizon, kappa, &out, plot)
        }
        Cmd::Bench {
            which, n, m, d, h, rho_max, seed, kappa, horizon, budget_secs, out,
        } => commands::bench(
            &which, n, m, d, &h, rho_max, seed, kappa, horizon, budget_secs, &out,
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
