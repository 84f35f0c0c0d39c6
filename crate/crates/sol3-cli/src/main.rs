//! Command-line front end: generate surface meshes and profile curves,
//! verify their invariants, and export figure data.
//!
//! Exit codes: 0 all checks pass, 1 a verification check failed,
//! 2 usage or configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sol3_cli::config::JobArgs;
use sol3_cli::{commands, config, output};

#[derive(Parser)]
#[command(
    name = "sol3",
    version,
    about = "Constant-angle surfaces in the Sol3 geometry: build, export, verify"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Export a surface mesh, CSV sweep, or profile polyline.
    Generate(JobArgs),
    /// Check the configured surface's invariants and report residuals.
    Verify(JobArgs),
    /// Write the catalogue of profile curves and cylinder meshes.
    Figures {
        /// Target directory (defaults to $SOL3_OUT_DIR, then ".").
        #[arg(long, value_name = "DIR")]
        out_dir: Option<PathBuf>,
    },
    /// Run the built-in self-check battery across all families.
    Report,
}

fn load_job(args: &JobArgs) -> anyhow::Result<config::Job> {
    let cfg = config::load(args)?;
    if let Some(path) = &args.emit_config {
        output::write_output(Some(path), &cfg.to_toml())?;
    }
    config::resolve(&cfg)
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.cmd {
        Command::Generate(args) => {
            commands::generate(&load_job(&args)?)?;
            Ok(true)
        }
        Command::Verify(args) => commands::verify(&load_job(&args)?),
        Command::Figures { out_dir } => {
            commands::figures(out_dir.as_deref())?;
            Ok(true)
        }
        Command::Report => commands::report(),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
