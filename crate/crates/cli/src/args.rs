use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "solharm", version, about = "Positive harmonic function on Sol3: verification and data export")]
pub struct Cli {
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the identity suite and the Laplacian residual grid.
    Verify(VerifyArgs),
    /// Tabulate the radial eigenfunction against the Legendre oracle.
    Eigenfunction(EigenArgs),
    /// Simulate Brownian motion: transience statistics and martingale check.
    Bm(BmArgs),
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct VerifyArgs {
    /// Shear parameter of A = [[1, a], [0, -1]].
    #[arg(long, default_value_t = 0.0)]
    pub a: f64,

    /// Finite-difference step.
    #[arg(long, default_value_t = solharm_core::verify::DEFAULT_FD_STEP)]
    pub h: f64,

    /// Grid as "x0:x1:nx,y0:y1:ny,z0:z1:nz".
    #[arg(long, allow_hyphen_values = true, default_value = "-2:2:21,-2:2:21,-2:2:21")]
    pub grid: String,

    /// Seed of the random identity samples.
    #[arg(long, default_value_t = solharm_core::verify::DEFAULT_SEED)]
    pub seed: u64,

    /// Random H2 samples per identity.
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct EigenArgs {
    #[arg(long, default_value_t = 10.0)]
    pub rmax: f64,

    #[arg(long, default_value_t = 1001)]
    pub points: usize,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct BmArgs {
    #[arg(long, default_value_t = 0.0)]
    pub a: f64,

    #[arg(long, default_value_t = 2000)]
    pub paths: usize,

    /// Time horizon.
    #[arg(long = "T", default_value_t = 50.0)]
    pub horizon: f64,

    #[arg(long, default_value_t = solharm_core::stochastic::TRANSIENCE_DT)]
    pub dt: f64,

    #[arg(long, default_value_t = 7)]
    pub seed: u64,

    /// Radius of the coordinate ball for the escape fraction.
    #[arg(long, default_value_t = 2.0)]
    pub radius: f64,

    /// Comma-separated checkpoint times (default: 10, 25, 50 up to T, and T).
    #[arg(long, value_delimiter = ',')]
    pub checkpoints: Option<Vec<f64>>,

    /// Also run the martingale check of the harmonic function.
    #[arg(long)]
    pub martingale: bool,

    /// Stop radius of the martingale check.
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,

    #[arg(long, default_value_t = 5000)]
    pub martingale_paths: usize,

    #[arg(long, default_value_t = solharm_core::stochastic::MARTINGALE_DT)]
    pub martingale_dt: f64,

    /// Horizon of the martingale check.
    #[arg(long = "martingale-T", default_value_t = 10.0)]
    pub martingale_horizon: f64,

    /// Write per-path samples (path_id,t,x,y,z) to this CSV file.
    #[arg(long)]
    pub dump_paths: Option<PathBuf>,

    /// Keep every k-th step in the path dump.
    #[arg(long, default_value_t = 1000)]
    pub dump_stride: usize,
}
