use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use truncfield_cli::Command;

#[derive(Parser)]
#[command(name = "truncfield", version, about = "Truncated Gaussian lattice field experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Directory receiving the JSON and CSV artifacts.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Coupled chains from the all-a and all-b configurations.
    Sandwich(RunArgs),
    /// Exact samples by coupling from the past, checked against oracles.
    Cftp(RunArgs),
    /// Stationarity identities on a torus.
    Ident4(RunArgs),
    /// Precision, cross matrix, mean and covariance of the volume.
    SpecCheck(RunArgs),
    /// Positive-definiteness certificate of the precision matrix.
    PdCheck(RunArgs),
    /// Inverse-temperature rescaling identity.
    BetaCheck(RunArgs),
    /// Bipartite reflection probe (measurement only).
    AfProbe(RunArgs),
    /// Quadrature oracle refinement and closed-form cross-check.
    OracleCheck(RunArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Sandwich(a) => (Command::Sandwich, a),
        Cmd::Cftp(a) => (Command::Cftp, a),
        Cmd::Ident4(a) => (Command::Ident4, a),
        Cmd::SpecCheck(a) => (Command::SpecCheck, a),
        Cmd::PdCheck(a) => (Command::PdCheck, a),
        Cmd::BetaCheck(a) => (Command::BetaCheck, a),
        Cmd::AfProbe(a) => (Command::AfProbe, a),
        Cmd::OracleCheck(a) => (Command::OracleCheck, a),
    };
    match truncfield_cli::run(command, &args.config, &args.out, args.seed) {
        Ok(outcome) => {
            let status = if outcome.pass { "pass" } else { "FAIL" };
            for a in &outcome.artifacts {
                println!("wrote {}", args.out.join(&a.file_name).display());
            }
            println!("{}: {status}", command.name());
            ExitCode::from(if outcome.pass { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
