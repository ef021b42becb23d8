use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pwfn_cli::{run, Kind, RunOptions};

#[derive(Parser)]
#[command(name = "pwfn", version, about = "Photon wave function scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Scenario config file.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long, value_name = "DIR", default_value = "pwfn-out")]
    out: PathBuf,
    /// Worker threads; recorded in the manifest.
    #[arg(long, value_name = "N", env = "PWFN_THREADS", default_value_t = 1)]
    threads: usize,
    #[arg(long)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    EvolveFree(RunArgs),
    EvolveMedium(RunArgs),
    EvolveCurved(RunArgs),
    FiberModes(RunArgs),
    BoostEigen(RunArgs),
    Wigner(RunArgs),
    Hydro(RunArgs),
    Observables(RunArgs),
    Commutators(RunArgs),
    /// Summarize grid files, CSV tables and manifests.
    Report {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

fn run_args(c: &Command) -> Option<&RunArgs> {
    match c {
        Command::EvolveFree(a)
        | Command::EvolveMedium(a)
        | Command::EvolveCurved(a)
        | Command::FiberModes(a)
        | Command::BoostEigen(a)
        | Command::Wigner(a)
        | Command::Hydro(a)
        | Command::Observables(a)
        | Command::Commutators(a) => Some(a),
        Command::Report { .. } => None,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let verbose = run_args(&cli.command).is_some_and(|a| a.verbose);
    env_logger::Builder::new().parse_filters(if verbose { "debug" } else { "warn" }).format_timestamp(None).init();
    let (kind, args) = match cli.command {
        Command::Report { files } => {
            return match pwfn_cli::report(&files) {
                Ok(s) => {
                    print!("{s}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("pwfn: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            };
        }
        Command::EvolveFree(a) => (Kind::EvolveFree, a),
        Command::EvolveMedium(a) => (Kind::EvolveMedium, a),
        Command::EvolveCurved(a) => (Kind::EvolveCurved, a),
        Command::FiberModes(a) => (Kind::FiberModes, a),
        Command::BoostEigen(a) => (Kind::BoostEigen, a),
        Command::Wigner(a) => (Kind::Wigner, a),
        Command::Hydro(a) => (Kind::Hydro, a),
        Command::Observables(a) => (Kind::Observables, a),
        Command::Commutators(a) => (Kind::Commutators, a),
    };
    let opts = RunOptions { config: args.config, out: args.out, threads: args.threads.max(1), verbose: args.verbose };
    match run(kind, &opts) {
        Ok(r) => {
            println!("{kind}: ok");
            for line in &r.summary {
                println!("  {line}");
            }
            for c in &r.checks {
                println!("  {} {:.3e} (tolerance {:.0e}) {}", c.name, c.value, c.tolerance, if c.pass() { "PASS" } else { "FAIL" });
            }
            for p in &r.outputs {
                println!("  wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("pwfn {kind}: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
