//! `embgeo` command-line interface.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "embgeo", version, about = "Multiscale geometry of labeled embedding point clouds")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Master seed for every random stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 0 picks the number of cores. Never changes results.
    #[arg(long, global = true, env = "EMBGEO_THREADS", default_value_t = 0)]
    pub threads: usize,
    /// Directory receiving all outputs (created if missing).
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
}

impl Global {
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mean intra-identity and inter-identity distances.
    Distances(commands::DistancesArgs),
    /// KS tests of attribute dependence and entropy summaries.
    Macro(commands::MacroArgs),
    /// Invariance energies of attribute curves across scales.
    Energy(commands::EnergyArgs),
    /// Toy MLP experiment; exits with 4 when the separation verdict fails.
    Toy(commands::ToyArgs),
    /// Materialize a synthetic dataset from a JSON spec.
    Synth(commands::SynthArgs),
    /// Remove per-identity outliers.
    Filter(commands::FilterArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.global.threads)
        .build_global()
    {
        eprintln!("embgeo: cannot configure threads: {e}");
        return ExitCode::from(2);
    }
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("embgeo: {e}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
