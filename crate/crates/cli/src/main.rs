//! `schurdil`: build trace-form Schur multipliers, search for representations,
//! and verify their finite-window dilations.
//!
//! Exit codes: 0 success, 1 validation failure, 2 numerical non-convergence,
//! 3 I/O error. Failures also print one JSON object on stderr.

mod commands;
mod complex;
mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::Sink;

#[derive(Parser, Debug)]
#[command(name = "schurdil", version, about = "Trace-form Schur multipliers and their dilations")]
pub struct Cli {
    /// Write the JSON artifact here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,

    /// Cap on the ambient dimension n·M^K of a dilation.
    #[arg(long, global = true, env = "SCHURDIL_DIM_CAP", default_value_t = schur_dilation::dilation::DEFAULT_DIM_CAP)]
    pub dim_cap: usize,

    /// Suppress the human-readable summary on stderr.
    #[arg(short, long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Emit a named example instance.
    #[command(subcommand)]
    Gen(GenCmd),
    /// Operations on trace representations.
    #[command(subcommand)]
    Rep(RepCmd),
    /// Search for a representation of a multiplier.
    Search(SearchArgs),
    /// Build and check the finite-window dilation of a representation.
    #[command(subcommand)]
    Dilate(DilateCmd),
    /// Operations on Schur multipliers.
    #[command(subcommand)]
    Schur(SchurCmd),
    /// Planted representation → multiplier → search → dilation → verify.
    Roundtrip(RoundtripArgs),
}

#[derive(Subcommand, Debug)]
pub enum GenCmd {
    /// The 2×2 table [[1, ω], [conj ω, 1]] from d = (1, ω) over ℂ.
    Omega {
        /// Unit complex number: `i`, `-i`, `0.6+0.8i`, `root:k/n`, ...
        #[arg(long, allow_hyphen_values = true)]
        omega: String,
        #[arg(long)]
        rep: bool,
    },
    /// The all-ones table (every d_i = 1).
    Allones {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rep: bool,
    },
    /// The identity table via Fourier phases over ℂ^n.
    IdentityFourier {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rep: bool,
    },
    /// d = (1, σ_x) over M_2.
    Pauli {
        #[arg(long)]
        rep: bool,
    },
    /// Haar-random unitaries over the algebra given by --spec.
    Planted {
        #[arg(long)]
        n: usize,
        /// Block sizes, e.g. "2" for M_2 or "2,1" for M_2 ⊕ ℂ (uniform trace).
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        rep: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum RepCmd {
    /// m_ij = τ(d_i* d_j).
    BuildMultiplier { input: PathBuf },
    /// Unitarity and trace-normalisation report.
    Validate {
        input: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Replace d_k by d_1* d_k.
    Gauge { input: PathBuf },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum MethodArg {
    Lm,
    Gradient,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    /// Target multiplier JSON.
    pub input: PathBuf,
    /// Block sizes of the algebra to search over, e.g. "2,1".
    #[arg(long, default_value = "1")]
    pub spec: String,
    /// Escalate through ℂ, ℂ², M_2, M_2⊕ℂ, M_3 instead of a fixed --spec.
    #[arg(long)]
    pub ladder: bool,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    pub target: f64,
    #[arg(long, default_value_t = 300)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 0.5)]
    pub step_size: f64,
    #[arg(long, value_enum, default_value = "lm")]
    pub method: MethodArg,
}

#[derive(Subcommand, Debug)]
pub enum DilateCmd {
    /// Build the dilation system from a representation or search result.
    Build {
        input: PathBuf,
        #[arg(long = "K", alias = "window")]
        window: usize,
    },
    /// Check E U^k J = T^k for k ≤ kmax.
    Verify {
        /// Dilation system, representation or search result.
        input: PathBuf,
        /// Window size, required unless the input is a dilation system.
        #[arg(long = "K", alias = "window")]
        window: Option<usize>,
        /// Defaults to K.
        #[arg(long)]
        kmax: Option<usize>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Random observables in addition to all matrix units.
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare the big-space pairing with the closed form on seeded vectors.
    Pair {
        input: PathBuf,
        #[arg(long = "K", alias = "window")]
        window: Option<usize>,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

#[derive(Subcommand, Debug)]
pub enum SchurCmd {
    /// Entrywise product of the table with a matrix.
    Apply { multiplier: PathBuf, matrix: PathBuf },
    /// Lower and certified upper bounds on the multiplier norm.
    Norm {
        multiplier: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 0x5c4)]
        seed: u64,
    },
    /// Complete positivity (positive semidefiniteness of the table).
    CpCheck {
        multiplier: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

#[derive(Args, Debug)]
pub struct RoundtripArgs {
    /// Number of unitaries.
    #[arg(long)]
    pub n: usize,
    /// Block sizes of the planted algebra, e.g. "2,1".
    #[arg(long)]
    pub spec: String,
    /// Window size.
    #[arg(long = "K", alias = "window")]
    pub window: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub target: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
}

fn main() {
    let cli = Cli::parse();
    let sink = Sink { path: cli.output.clone(), quiet: cli.quiet };
    if let Err(e) = commands::run(&cli, &sink) {
        eprintln!("{}", e.to_json());
        std::process::exit(e.code as i32);
    }
}
