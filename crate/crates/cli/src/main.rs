use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qsl_cli::check;
use qsl_cli::runner::{self, write_atomic};
use qsl_cli::{parse_config, CliError, CliResult};

/// Quantum speed-limit scenarios: distances, Fisher information, bounds and the star-graph counterexample.
#[derive(Parser)]
#[command(name = "qsl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single scenario config.
    Run {
        config: PathBuf,
        /// Add wall time to the report (makes it non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Run a config over the values of its [sweep] table.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        timing: bool,
    },
    /// Run the built-in acceptance suite.
    Check {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the report to this file.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Append per-criterion wall time to each line.
        #[arg(long)]
        timing: bool,
    },
}

fn run_config(path: &Path, sweep: bool, timing: bool) -> CliResult<()> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    let config = parse_config(&text).map_err(|e| match e {
        CliError::Parse { line, col, message } => {
            CliError::Parse { line, col, message: format!("{}: {message}", path.display()) }
        }
        other => other,
    })?;
    match (sweep, config.sweep.is_some()) {
        (true, false) => return Err(CliError::validation_error("sweep", "`qsl sweep` needs a [sweep] table")),
        (false, true) => return Err(CliError::validation_error("sweep", "use `qsl sweep` for configs with a [sweep] table")),
        _ => {}
    }
    let report = runner::run(&config)?;
    runner::write_outputs(&report, &config, timing)?;
    eprintln!("{}: {} scenario(s) in {:.3} s", config.kind.name(), report.results.len(), report.elapsed.as_secs_f64());
    println!("{}", config.output_path.display());
    if report.invariant_violations.is_empty() {
        Ok(())
    } else {
        Err(CliError::Invariant { context: config.kind.name().into(), message: report.invariant_violations.join("; ") })
    }
}

fn run_check(seed: u64, output: Option<&Path>, timing: bool) -> CliResult<()> {
    let outcomes = check::run_all(seed);
    let text = check::render(&outcomes, seed, timing);
    print!("{text}");
    if let Some(path) = output {
        write_atomic(path, text.as_bytes())?;
    }
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| o.criterion.id.to_string()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Invariant { context: "check".into(), message: format!("criteria {} failed", failed.join(", ")) })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config, timing } => run_config(config, false, *timing),
        Command::Sweep { config, timing } => run_config(config, true, *timing),
        Command::Check { seed, output, timing } => run_check(*seed, output.as_deref(), *timing),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qsl: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
