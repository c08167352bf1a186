use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cochain_transfer::pipeline::{check_tolerance, run_with, Export, RunConfig};
use cochain_transfer::verify::Suite;
use cochain_transfer::Error;

/// Homotopy transfer of vector-field actions onto cochains, with verification.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for the JSON exports and the report.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Tolerance for floating-point backends.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Restrict to one suite (repeatable): build, homotopy, forms, liealg, transfer, cme.
    #[arg(long, global = true)]
    suite: Vec<String>,

    /// Print the report as JSON instead of the text summary.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Build the backend and check duality, closure and h on the basis.
    Build,
    /// Run the verification suites, diffing golden tables when configured.
    Verify,
    /// Compute and export the word tensors.
    Transfer,
    /// Assemble the action and export the master-equation residual.
    Cme,
    /// Run the configured suites and write the report.
    Report,
    /// Every suite and every export.
    All,
}

impl Command {
    fn plan(self) -> (Option<Vec<Suite>>, Vec<Export>) {
        match self {
            Command::Build => (Some(vec![Suite::Build]), vec![Export::Report]),
            Command::Verify | Command::Report => (None, vec![Export::Report]),
            Command::Transfer => (
                Some(vec![Suite::Transfer]),
                vec![Export::Tensors, Export::StructureConstants, Export::Xi, Export::Report],
            ),
            Command::Cme => (
                Some(vec![Suite::Cme]),
                vec![Export::Cme, Export::StructureConstants, Export::Report],
            ),
            Command::All => (Some(Suite::ALL.to_vec()), Export::ALL.to_vec()),
        }
    }
}

fn configure(cli: &Cli) -> Result<(RunConfig, Vec<Export>), Error> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("--config is required".into()))?;
    let mut cfg = RunConfig::load(path)?;
    let (suites, exports) = cli.command.plan();
    if let Some(s) = suites {
        cfg.suites = s.into_iter().collect();
    }
    if !cli.suite.is_empty() {
        cfg.suites = cli.suite.iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
    }
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    if let Some(t) = cli.tol {
        check_tolerance(t)?;
        cfg.tol = Some(t);
    }
    Ok((cfg, exports))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (cfg, exports) = match configure(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match run_with(&cfg, &exports) {
        Ok(r) => r,
        Err(e @ (Error::Config(_) | Error::InvalidNodes(_))) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if cli.json {
        match serde_json::to_string_pretty(&report) {
            Ok(s) => println!("{s}"),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        }
    } else {
        print!("{}", report.summary());
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
