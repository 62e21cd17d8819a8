//! `rearrkit`: command-line front end for the verification suites.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rearrkit_core::config::{Format, OutputSpec};
use rearrkit_core::report::{emit_report, write_report};
use rearrkit_core::{run_suite, RunConfig, SuiteKind};

/// Exit status for configuration and input errors.
const CONFIG_ERROR: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "rearrkit", version, about = "Numerical checks of rearrangement inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Polarization sequences converging to the symmetric decreasing rearrangement.
    Rearrange(Common),
    /// Check an extended rearrangement inequality on random trials.
    Verify {
        #[command(subcommand)]
        which: Verify,
    },
    /// Two-point monotonicity of a functional over every reflection.
    TwoPoint(Common),
    /// Brute-force maximization over couplings against the rearranged functional.
    Oracle(Common),
    /// Reproduce a counterexample.
    Counterexample {
        #[command(subcommand)]
        which: Counterexample,
    },
    /// Discrete Brunn-Minkowski on random index sets.
    BmCheck(Common),
    /// Waveguide ground states.
    Optics {
        #[command(subcommand)]
        which: Optics,
    },
}

#[derive(Debug, Subcommand)]
enum Verify {
    /// Hardy-Littlewood functional.
    Hl(Common),
    /// Riesz functional.
    Riesz(Common),
}

#[derive(Debug, Subcommand)]
enum Counterexample {
    /// Polarization can decrease the three-function convolution form.
    Riesz(Common),
}

#[derive(Debug, Subcommand)]
enum Optics {
    /// Projected gradient descent with periodic symmetrization.
    Solve {
        #[command(flatten)]
        common: Common,
        /// CSV file receiving the energy traces.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    /// Report path; `.csv` selects CSV, anything else JSON. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Command {
    fn resolve(self) -> (SuiteKind, Common, Option<PathBuf>) {
        match self {
            Command::Rearrange(c) => (SuiteKind::Rearrange, c, None),
            Command::Verify { which: Verify::Hl(c) } => (SuiteKind::Hl, c, None),
            Command::Verify { which: Verify::Riesz(c) } => (SuiteKind::Riesz, c, None),
            Command::TwoPoint(c) => (SuiteKind::TwoPoint, c, None),
            Command::Oracle(c) => (SuiteKind::Oracle, c, None),
            Command::Counterexample { which: Counterexample::Riesz(c) } => (SuiteKind::CounterexampleRiesz, c, None),
            Command::BmCheck(c) => (SuiteKind::BmCheck, c, None),
            Command::Optics { which: Optics::Solve { common, trace } } => (SuiteKind::Optics, common, trace),
        }
    }
}

fn load_config(suite: SuiteKind, common: &Common, trace: Option<PathBuf>) -> Result<RunConfig> {
    let mut config = match &common.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::new(suite),
    };
    if config.suite != suite {
        bail!("config is for suite `{}` but `{}` was requested", config.suite.name(), suite.name());
    }
    if let Some(t) = common.trials {
        config.trials = t;
    }
    if let Some(s) = common.seed {
        config.seed = s;
    }
    if let Some(t) = common.tol {
        config.tol = t;
    }
    if let Some(path) = &common.out {
        config.output = Some(OutputSpec { path: path.clone(), format: None });
    }
    if trace.is_some() {
        config.trace = trace;
    }
    config.validate()?;
    Ok(config)
}

fn configure_threads() -> Result<()> {
    if let Ok(value) = std::env::var("RK_THREADS") {
        let threads: usize = value.parse().with_context(|| format!("RK_THREADS must be a positive integer, got `{value}`"))?;
        if threads == 0 {
            bail!("RK_THREADS must be a positive integer, got 0");
        }
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    Ok(())
}

/// Runs the suite and returns its exit status; errors map to status 2.
fn run(cli: Cli) -> Result<u8> {
    configure_threads()?;
    let (suite, common, trace) = cli.command.resolve();
    let config = load_config(suite, &common, trace)?;
    let outcome = run_suite(&config)?;
    match &config.output {
        Some(out) => emit_report(&outcome.rows, out.format(), &out.path)
            .with_context(|| format!("writing report to {}", out.path.display()))?,
        None => write_report(&outcome.rows, Format::Json, std::io::stdout().lock())?,
    }
    if let Some(path) = &config.trace {
        let file = std::fs::File::create(path).with_context(|| format!("writing trace to {}", path.display()))?;
        outcome.write_traces(std::io::BufWriter::new(file))?;
    }
    let held = outcome.rows.iter().filter(|r| r.holds).count();
    let mut err = std::io::stderr().lock();
    writeln!(err, "{}: {held}/{} trials hold", suite.name(), outcome.rows.len())?;
    for row in outcome.rows.iter().filter(|r| !r.holds) {
        writeln!(err, "  trial {} violated: lhs {} rhs {} slack {}", row.trial, row.lhs, row.rhs, row.slack)?;
    }
    Ok(outcome.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { CONFIG_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(CONFIG_ERROR)
        }
    }
}
