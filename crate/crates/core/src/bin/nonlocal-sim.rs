use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use nonlocal::harness::{load_config, run_experiment, write_outputs, Experiment};

/// Environment variable naming the output directory used when neither `--out` nor the
/// config sets one.
const OUT_ENV: &str = "NONLOCAL_SIM_OUT";
const DEFAULT_OUT: &str = "nonlocal-out";

#[derive(Parser)]
#[command(
    name = "nonlocal-sim",
    version,
    about = "Run nonlocal interferometry and light-cone experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its CSV, sidecar and manifest.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the config and the NONLOCAL_SIM_OUT variable.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Parse and check a config, printing it resolved to natural units.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// List the experiments a config can name.
    ListExperiments,
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run { config, out, seed } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let dir = out
                .or_else(|| cfg.output_dir.clone())
                .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
            let result =
                run_experiment(&cfg).with_context(|| format!("running {}", cfg.experiment()))?;
            for w in &result.warnings {
                eprintln!("warning [{}]: {}", w.code, w.message);
            }
            let manifest = write_outputs(&result, &dir)?;
            println!(
                "{}: {} rows, {} files in {}",
                result.experiment,
                result.scan.len(),
                manifest.files.len() + 1,
                dir.display()
            );
        }
        Command::Validate { config } => {
            let cfg = load_config(&config)?;
            print!("{}", cfg.to_json_string());
        }
        Command::ListExperiments => {
            for e in Experiment::ALL {
                println!("{:<24}{}", e.name(), e.description());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e
                .downcast_ref::<nonlocal::Error>()
                .map_or(1, nonlocal::Error::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
