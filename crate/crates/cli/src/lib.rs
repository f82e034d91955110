//! Command-line front end for the non-Hermitian Creutz ladder toolkit.
//!
//! Every subcommand reads a configuration document (see [`config`]), runs
//! the requested computation, and writes CSV/JSON files into the output
//! directory together with a `manifest.json`.

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod output;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use creutz_core::spectral::{EdgeOptions, Gauge};

pub use config::Config;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "creutz", version, about = "Spectra, topology and skin effect of the non-Hermitian Creutz ladder")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Configuration file (flat parameter table plus optional [sweep]).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Momentum grid size for periodic-band computations.
    #[arg(long, global = true, default_value_t = 1024)]
    pub nk: usize,
    /// Number of unit cells; overrides `L` from the configuration.
    #[arg(long = "L", global = true)]
    pub cells: Option<usize>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Largest accepted eigenvector residual relative to the Frobenius norm.
    #[arg(long, global = true, default_value_t = creutz_core::linalg::TOL_EIG)]
    pub tol: f64,
    /// Minimum distance of an edge pair from the rest of the open-chain spectrum.
    #[arg(long, global = true, default_value_t = EdgeOptions::default().min_isolation)]
    pub edge_isolation: f64,
    /// Largest pair splitting as a fraction of its isolation.
    #[arg(long, global = true, default_value_t = EdgeOptions::default().pair_ratio)]
    pub edge_ratio: f64,
    /// Minimum distance of edge modes from the periodic spectrum (0 disables).
    #[arg(long, global = true, default_value_t = EdgeOptions::default().min_pbc_distance.unwrap_or(0.0))]
    pub edge_pbc_distance: f64,
    /// Minimum |dIPR| of edge modes (0 disables).
    #[arg(long, global = true, default_value_t = 0.0)]
    pub edge_dipr: f64,
    /// Splitting-to-isolation ratio above which a pair must reappear with
    /// one more cell (0 disables).
    #[arg(long, global = true, default_value_t = EdgeOptions::default().confirm_ratio.unwrap_or(0.0))]
    pub edge_confirm: f64,
    /// Diagonalize open chains without the uniform-skin imaginary gauge.
    #[arg(long, global = true)]
    pub no_gauge: bool,
}

impl GlobalArgs {
    pub fn edge_options(&self) -> EdgeOptions {
        EdgeOptions {
            min_isolation: self.edge_isolation,
            pair_ratio: self.edge_ratio,
            min_pbc_distance: (self.edge_pbc_distance > 0.0).then_some(self.edge_pbc_distance),
            min_dipr: (self.edge_dipr > 0.0).then_some(self.edge_dipr),
            confirm_ratio: (self.edge_confirm > 0.0).then_some(self.edge_confirm),
            nk_ref: self.nk,
            gauge: if self.no_gauge { Gauge::None } else { Gauge::Auto },
        }
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Periodic bands, open-chain spectrum with dIPR and edge flags, and
    /// per-band density profiles.
    Spectrum,
    /// Two-axis (or one-axis) grid of gap labels, edge counts and dIPRs.
    PhaseDiagram,
    /// Spectral winding numbers at given or automatically gridded energies.
    Winding {
        /// Reference energy `re,im`; repeat for several. Without it a grid
        /// over the bounding box of the periodic spectrum is scanned.
        #[arg(long = "eref", value_parser = parse_complex, allow_hyphen_values = true)]
        eref: Vec<(f64, f64)>,
        /// Points per side of the automatic grid.
        #[arg(long, default_value_t = 24)]
        grid: usize,
    },
    /// Periodic gap closings versus open-chain edge transitions along the
    /// sweep axis.
    Bbc,
    /// Zero-energy transfer-matrix eigenvalues (imaginary-flux chain),
    /// at the configured point or along the sweep axis.
    TransferMatrix,
    /// Closed-form phase boundaries and transition angles.
    Boundaries,
}

fn parse_complex(s: &str) -> Result<(f64, f64), String> {
    let (re, im) = s.split_once(',').unwrap_or((s, "0"));
    let re = re.trim().parse::<f64>().map_err(|e| format!("bad real part {re:?}: {e}"))?;
    let im = im.trim().parse::<f64>().map_err(|e| format!("bad imaginary part {im:?}: {e}"))?;
    Ok((re, im))
}

/// Fully resolved invocation shared by the commands.
#[derive(Debug, Clone)]
pub struct Context {
    pub config: Config,
    pub global: GlobalArgs,
    pub out: output::OutDir,
    pub started: Instant,
}

impl Context {
    pub fn nk(&self) -> usize {
        self.global.nk
    }

    pub fn cells(&self) -> usize {
        self.config.params.cells
    }
}

/// Loads the configuration, applies flag overrides and runs the command.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let mut config = match &cli.global.config {
        Some(p) => Config::load(p)?,
        None => Config::parse("")?,
    };
    if let Some(l) = cli.global.cells {
        config.params.cells = l;
    }
    config.validate()?;
    if cli.global.nk == 0 {
        return Err(CliError::config("--nk must be positive"));
    }
    if !(cli.global.tol > 0.0) {
        return Err(CliError::config("--tol must be positive"));
    }
    let ctx = Context {
        config,
        global: cli.global.clone(),
        out: output::OutDir::create(&cli.global.out)?,
        started: Instant::now(),
    };
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(t) = cli.global.threads {
            if t == 0 {
                return Err(CliError::config("--threads must be positive"));
            }
            b = b.num_threads(t);
        }
        b.build().map_err(|e| CliError::config(format!("thread pool: {e}")))?
    };
    pool.install(|| match &cli.command {
        Command::Spectrum => commands::spectrum::run(&ctx),
        Command::PhaseDiagram => commands::phase::run(&ctx),
        Command::Winding { eref, grid } => commands::winding::run(&ctx, eref, *grid),
        Command::Bbc => commands::bbc::run(&ctx),
        Command::TransferMatrix => commands::transfer::run(&ctx),
        Command::Boundaries => commands::boundaries::run(&ctx),
    })
}
