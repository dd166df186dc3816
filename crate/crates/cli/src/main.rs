use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use holderlab_cli::config::parse_config_with;
use holderlab_cli::{run, CliError, Scenario};

#[derive(Parser)]
#[command(name = "holderlab", version, about = "Solve and certify singular parabolic problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration (key=value lines).
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,

    /// Output directory, overriding `output_dir`.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Seed, overriding `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Log progress to stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Run the solver and write the snapshot.
    Solve,
    /// Integral Harnack check on the solved field.
    CheckHarnack,
    /// Expansion of positivity check.
    CheckExpansion,
    /// Critical-mass check (doubly nonlinear).
    CheckCriticalMass,
    /// Fit a Hölder exponent from cylinder oscillations.
    FitHolder,
    /// Write the proof-constant ledger.
    Constants,
    /// Full certification pipeline.
    Certify,
}

impl Command {
    fn scenario(self) -> Scenario {
        match self {
            Command::Solve => Scenario::Solve,
            Command::CheckHarnack => Scenario::CheckHarnack,
            Command::CheckExpansion => Scenario::CheckExpansion,
            Command::CheckCriticalMass => Scenario::CheckCriticalMass,
            Command::FitHolder => Scenario::FitHolder,
            Command::Constants => Scenario::ConstantsLedger,
            Command::Certify => Scenario::FullCertify,
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let path = cli.config.as_ref().ok_or(CliError::Parse {
        line: 0,
        message: "--config is required".into(),
    })?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut cfg = parse_config_with(&text, Some(cli.command.scenario()))?;
    if let Some(dir) = &cli.output {
        cfg.output_dir = dir.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let outcome = run(&cfg)?;
    for r in &outcome.reports {
        println!("{}: {}", r.check_name, r.verdict.as_str());
    }
    for a in &outcome.artifacts {
        log::info!("wrote {}", a.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
