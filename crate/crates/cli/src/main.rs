use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use djcheck::{load, run_scenario, CliError, Overrides};

#[derive(Parser)]
#[command(name = "djcheck", version, about = "Run Dirac-Jacobi verification scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks of a scenario file.
    Run(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    scenario: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Sample points per check.
    #[arg(long)]
    samples: Option<usize>,
    /// Absolute and relative zero tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Print check names and operations, then exit.
    #[arg(long)]
    list_checks: bool,
    /// Run only these checks.
    #[arg(long, num_args = 1..)]
    only: Vec<String>,
    /// Record wall time per check (makes reports non-reproducible).
    #[arg(long)]
    timing: bool,
    /// Disable data-parallel sampling.
    #[arg(long)]
    sequential: bool,
}

fn run(args: RunArgs) -> Result<bool, CliError> {
    let overrides = Overrides {
        seed: args.seed,
        samples: args.samples,
        tol: args.tol,
        sequential: args.sequential,
    };
    if args.list_checks {
        let loaded = load(&args.scenario, &overrides)?;
        let text: String = loaded
            .plan
            .checks
            .iter()
            .map(|c| format!("{}\t{}\texpect {:?}\n", c.name, c.op, c.expect))
            .collect();
        emit(&text);
        return Ok(true);
    }
    let report = run_scenario(&args.scenario, &overrides, &args.only, args.timing)?;
    if let Some(path) = &args.report {
        std::fs::write(path, report.to_json()).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        })?;
    }
    emit(&report.human());
    Ok(report.all_as_expected())
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    let Command::Run(args) = Cli::parse().command;
    match run(args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
