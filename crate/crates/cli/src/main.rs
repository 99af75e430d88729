use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use jc_catalysis_cli::config::RunConfig;
use jc_catalysis_cli::{configure_threads, experiments, CliError};

#[derive(Parser)]
#[command(
    name = "jc-catalysis",
    version = concat!(env!("CARGO_PKG_VERSION"), " (format v1)"),
    about = "Catalytic Jaynes-Cummings dynamics: experiment runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment described by a flat key-value config file.
    Run {
        /// Path to the configuration file.
        #[arg(long)]
        config: PathBuf,
        /// Override the config's output directory.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Worker threads (overrides the THREADS environment variable).
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, output, threads } => {
            let threads = threads.or_else(|| {
                std::env::var("THREADS").ok().and_then(|v| v.parse::<usize>().ok())
            });
            configure_threads(threads);
            match run(&config, output) {
                Ok(files) => {
                    for file in files {
                        println!("wrote {}", file.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}

fn run(config_path: &PathBuf, output: Option<PathBuf>) -> Result<Vec<PathBuf>, CliError> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", config_path.display())))?;
    let mut config = RunConfig::parse(&text)?;
    if let Some(dir) = output {
        config.output_dir = dir;
    }
    experiments::run(&config)
}
