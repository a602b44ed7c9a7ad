use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qd_cli::commands::{run_qd_crossed, run_qd_lambda, run_tile};
use qd_cli::config::RunConfig;
use qd_cli::presets::Preset;
use qd_cli::{exit_status, CliError};

#[derive(Debug, Parser)]
#[command(name = "qdcheck", version, about = "Følner tilings, quasidiagonal projections and crossed-product commutator checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build and certify tilings `G = K L` for each level.
    Tile(RunArgs),
    /// Coset identities, projection laws and `[lambda(s), P]` norms.
    QdLambda(RunArgs),
    /// Commutator estimates for `Q (x) P` against `sigma(a)`.
    QdCrossed(RunArgs),
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    #[arg(long)]
    threads: Option<usize>,
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let (args, cmd): (&RunArgs, fn(&RunConfig, &std::path::Path) -> _) = match &cli.command {
        Command::Tile(a) => (a, run_tile),
        Command::QdLambda(a) => (a, run_qd_lambda),
        Command::QdCrossed(a) => (a, run_qd_crossed),
    };
    if let Some(k) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let cfg = RunConfig::load(args.config.as_deref(), args.preset)?;
    let outcome = cmd(&cfg, &args.out)?;
    println!("{}", outcome.summary);
    for f in &outcome.files {
        println!("  wrote {}", f.display());
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = run(cli);
    if let Err(e) = &result {
        eprintln!("qdcheck: {e}");
    }
    ExitCode::from(exit_status(&result))
}
