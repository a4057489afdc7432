use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use strichartz_lab::{configure_threads, plot_results_file, run_config_file, ExperimentConfig, LabError};

#[derive(Parser)]
#[command(name = "strichartz-lab", version, about = "Run dispersive-estimate experiments from TOML configs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write CSV results plus a .meta.toml sidecar.
    Run {
        config: PathBuf,
        /// Results path; overrides `output` in the config.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a config without running it.
    Validate { config: PathBuf },
    /// Write a matplotlib script for a results file.
    Plot {
        results: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn dispatch(cli: Cli) -> anyhow::Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Run { config, output } => {
            let (out, rows) = run_config_file(&config, output.as_deref())
                .with_context(|| format!("running {}", config.display()))?;
            println!("wrote {rows} rows to {} ({})", out.results.display(), out.meta.display());
        }
        Command::Validate { config } => {
            let cfg = ExperimentConfig::from_path(&config).with_context(|| format!("validating {}", config.display()))?;
            println!("{}: valid {} config", config.display(), cfg.kind.name());
        }
        Command::Plot { results, output } => {
            let (path, warnings) =
                plot_results_file(&results, output.as_deref()).with_context(|| format!("plotting {}", results.display()))?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<LabError>().map_or(1, LabError::exit_code);
            ExitCode::from(code)
        }
    }
}
