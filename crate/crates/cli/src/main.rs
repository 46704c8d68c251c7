//! vacsim: local structure of a scalar-field cavity vacuum.
//!
//! A Dirichlet cavity of length R is cut at t = 0 into sub-regions by
//! instantaneous mirrors; the commands expose the resulting Gaussian state:
//! symplectic spectra and entropies, pairwise entanglement between regions,
//! and the spatial shape of the diagonal-basis modes.

mod cache;
mod commands;
mod config;

use clap::{Args, Parser, Subcommand};
use commands::{BasisChoice, CliError, Format, RegionChoice};
use config::{Scenario, Settings};
use std::path::PathBuf;
use std::process::ExitCode;
use vacsim_core::error::Error;

#[derive(Parser)]
#[command(
    name = "vacsim",
    version,
    about = "Sub-region structure of a cavity vacuum: spectra, negativity maps, mode profiles"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Clone)]
struct ScenarioArgs {
    /// Cavity length R
    #[arg(long)]
    length: Option<f64>,

    /// Field mass
    #[arg(long)]
    mass: Option<f64>,

    /// Mirror position for a two-region cut (0 < split < length)
    #[arg(long, conflicts_with = "three")]
    split: Option<f64>,

    /// Three-region cut as comma-separated lengths summing to the cavity
    #[arg(long, value_delimiter = ',', value_name = "A,B,C")]
    three: Option<Vec<f64>>,

    /// Modes kept per region
    #[arg(long)]
    modes: Option<usize>,

    /// Cavity-mode truncation of the sums (default: 20 x modes)
    #[arg(long)]
    global_modes: Option<usize>,

    /// Worker threads (default: one per core)
    #[arg(long)]
    jobs: Option<usize>,

    /// key=value parameter file; explicit flags override it
    #[arg(long)]
    config: Option<PathBuf>,

    /// Directory for cached overlap tables
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

impl ScenarioArgs {
    fn to_settings(&self) -> Result<Settings, Error> {
        let three = match &self.three {
            None => None,
            Some(v) if v.len() == 3 => Some((v[0], v[1], v[2])),
            Some(v) => {
                return Err(Error::InvalidConfig(format!(
                    "three wants exactly 3 lengths, got {}",
                    v.len()
                )))
            }
        };
        Ok(Settings {
            length: self.length,
            mass: self.mass,
            split: self.split,
            three,
            modes: self.modes,
            global_modes: self.global_modes,
            jobs: self.jobs,
            cache_dir: self.cache_dir.clone(),
        })
    }

    fn resolve(&self) -> Result<Scenario, CliError> {
        let base = match &self.config {
            Some(path) => Settings::from_file(path)?,
            None => Settings::default(),
        };
        let scenario = base.overlay(self.to_settings()?).resolve()?;
        if let Some(jobs) = scenario.jobs {
            rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build_global()
                .map_err(|e| Error::InvalidConfig(format!("cannot configure jobs: {e}")))?;
        }
        Ok(scenario)
    }
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Output file (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum Cmd {
    /// Symplectic spectrum, entropy terms and occupation numbers of a region
    Spectrum {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Region to analyze (default: first region; `joint` for all)
        #[arg(long, value_enum)]
        region: Option<RegionChoice>,
    },
    /// Pairwise logarithmic negativity between the two outer regions
    NegativityMap {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Mode basis for the pairs
        #[arg(long, value_enum, default_value_t = BasisChoice::U)]
        basis: BasisChoice,
        /// Map extent: pairs (1..=window) x (1..=window)
        #[arg(long, default_value_t = 8)]
        window: usize,
    },
    /// Spatial profile |v(x, t)| of one diagonal-basis mode
    Profile {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Region owning the mode (default: first region)
        #[arg(long, value_enum)]
        region: Option<RegionChoice>,
        /// Which diagonal mode, 1-based
        #[arg(long, default_value_t = 1)]
        mode_index: usize,
        /// Evaluation time; repeat for several snapshots (default: 0)
        #[arg(long = "time")]
        times: Vec<f64>,
        /// Number of grid points across the cavity
        #[arg(long, default_value_t = 512)]
        grid: usize,
    },
    /// Run internal consistency checks on the configured scenario
    Check {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Cmd::Spectrum { scenario, output, region } => {
            let scn = scenario.resolve()?;
            commands::spectrum(&scn, region, output.format, &output.out)?;
            Ok(0)
        }
        Cmd::NegativityMap { scenario, output, basis, window } => {
            let scn = scenario.resolve()?;
            commands::map(&scn, basis, window, output.format, &output.out)?;
            Ok(0)
        }
        Cmd::Profile { scenario, output, region, mode_index, times, grid } => {
            let scn = scenario.resolve()?;
            commands::profile(&scn, region, mode_index, &times, grid, output.format, &output.out)?;
            Ok(0)
        }
        Cmd::Check { scenario } => {
            let scn = scenario.resolve()?;
            Ok(if commands::check(&scn)? { 0 } else { 3 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
