//! Load an experiment file and run one estimate from it.
//!
//! `cargo run --example config_run -- configs/verify.toml radon`
use std::path::PathBuf;

use backscatter::cli::run_estimate;
use backscatter::config::ExperimentConfig;

fn main() -> backscatter::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = PathBuf::from(args.next().unwrap_or_else(|| "configs/verify.toml".into()));
    let name = args.next().unwrap_or_else(|| "radon".into());
    let (cfg, _) = ExperimentConfig::load(&path)?;
    let rep = run_estimate(&name, &cfg, cfg.seed)?;
    println!("{}", serde_json::to_string_pretty(&rep).expect("serializable"));
    Ok(())
}
