use std::path::PathBuf;
use std::process::ExitCode;

use backscatter::cli;
use backscatter::config::ExperimentConfig;
use backscatter::error::Error;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "backscatter", version, about = "Backscattering forward runs, estimate checks and Born inversion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output_dir` in the config)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    /// Seed for randomized inputs (overrides `seed` in the config)
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the configured potential and write the backscattering dataset
    Forward(Common),
    /// Run the configured estimates and write one report per estimate
    Verify(Common),
    /// Reconstruct the potential from a dataset in the Born approximation
    Invert {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        dataset: PathBuf,
    },
    /// Summarize the reports in an output directory
    Report {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn setup(c: &Common) -> Result<(ExperimentConfig, String, PathBuf, u64), Error> {
    if let Some(n) = c.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Error::Config(format!("threads: {e}")))?;
    }
    let (cfg, raw) = ExperimentConfig::load(&c.config)?;
    let out = c.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
    let seed = c.seed.unwrap_or(cfg.seed);
    Ok((cfg, raw, out, seed))
}

fn run(cli: Cli) -> Result<u8, Error> {
    let verdict = match cli.command {
        Command::Forward(c) => {
            let (cfg, raw, out, _) = setup(&c)?;
            cli::cmd_forward(&cfg, &raw, &out)?
        }
        Command::Verify(c) => {
            let (cfg, raw, out, seed) = setup(&c)?;
            cli::cmd_verify(&cfg, &raw, &out, seed)?
        }
        Command::Invert { common, dataset } => {
            let (cfg, raw, out, _) = setup(&common)?;
            cli::cmd_invert(&cfg, &raw, &dataset, &out)?
        }
        Command::Report { config, out } => {
            let dir = match (out, config) {
                (Some(d), _) => d,
                (None, Some(c)) => ExperimentConfig::load(&c)?.0.output_dir,
                (None, None) => return Err(Error::Config("report needs --out or --config".into())),
            };
            let (table, v) = cli::cmd_report(&dir)?;
            print!("{table}");
            v
        }
    };
    Ok(cli::exit_status(verdict))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::error_status(&e))
        }
    }
}
