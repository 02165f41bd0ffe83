use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "invmetric", version, about = "Invariant metrics on convex domains")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Domain file (JSON).
    #[arg(long, global = true)]
    pub domain: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Finsler graph pitch.
    #[arg(long, global = true, default_value_t = 0.02)]
    pub pitch: f64,
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol: f64,
    /// Write report files and a manifest into this directory.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Machine-readable JSON on standard output.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub json: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Kobayashi,
    Euclidean,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "name")]
pub enum Command {
    /// Parse a domain file and summarise it.
    Validate {
        /// Domain file; overrides --domain.
        file: Option<PathBuf>,
    },
    /// Hilbert distance between two points.
    HilbertDist {
        file: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        y: Vec<f64>,
    },
    /// Kobayashi distance bracket on the complex line through two points.
    KobBracket {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        z1: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        z2: Vec<f64>,
        /// Radius of the graph window around z1.
        #[arg(long, default_value_t = 2.0)]
        window: f64,
    },
    /// Four-point hyperbolicity constant of a distance matrix.
    Delta4 {
        /// CSV: header row of labels, then the square matrix.
        #[arg(long)]
        metric: PathBuf,
    },
    /// Normalizing map at a boundary point.
    Normalize {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        z0: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        xi: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        q: Option<Vec<f64>>,
    },
    /// Rescaling sequence towards a boundary point.
    Blowup {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        z0: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        xi: Vec<f64>,
        /// Decreasing eps schedule.
        #[arg(long, value_delimiter = ',', default_value = "0.5,0.25,0.125,0.0625,0.03125")]
        eps: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Rule::Kobayashi)]
        rule: Rule,
    },
    /// m-convexity exponent fit along rays to boundary points.
    Mconvex {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        z0: Vec<f64>,
        /// Boundary point as comma-separated reals; repeat the flag for several.
        #[arg(long, allow_hyphen_values = true, required = true)]
        xi: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "1e-2,1e-3,1e-4,1e-5")]
        grid: Vec<f64>,
    },
    /// Search the boundary for an affine disk.
    DiskDetect {
        /// Ray-casting origin; the domain witness by default.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        center: Option<Vec<f64>>,
        #[arg(long, default_value_t = 200)]
        budget: usize,
    },
    /// Affine growth constant of Kobayashi distance along quasi-geodesics.
    AlphaFit {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        z0: Vec<f64>,
        /// Boundary point as comma-separated reals; repeat the flag for several.
        #[arg(long, allow_hyphen_values = true, required = true)]
        xi: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5,0.75,1,1.25,1.5,1.75,2")]
        t: Vec<f64>,
    },
    /// Dyadic plurisubharmonic certificate and its Levi floor.
    PshCertify {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        z0: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        xi: Vec<f64>,
        #[arg(long, default_value_t = 2.5)]
        m2: f64,
        #[arg(long, default_value_t = 2.0)]
        m0: f64,
        #[arg(long, default_value_t = 1)]
        k0: u32,
        #[arg(long)]
        k_max: Option<u32>,
        /// Boundary distances of the Levi probes.
        #[arg(long, value_delimiter = ',', default_value = "0.0625,0.03125,0.015625,0.0078125,0.00390625")]
        deltas: Vec<f64>,
    },
    /// Hilbert distance on a real base against Kobayashi brackets on its tube.
    TubeSandwich {
        #[arg(long, default_value_t = 20)]
        pairs: usize,
        /// Pairs are drawn from the base shrunk by this factor around its witness.
        #[arg(long, default_value_t = 0.9)]
        shrink: f64,
    },
    /// normalize, mconvex, blowup and psh-certify at one boundary point.
    Report {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        z0: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        xi: Vec<f64>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::HilbertDist { .. } => "hilbert-dist",
            Command::KobBracket { .. } => "kob-bracket",
            Command::Delta4 { .. } => "delta4",
            Command::Normalize { .. } => "normalize",
            Command::Blowup { .. } => "blowup",
            Command::Mconvex { .. } => "mconvex",
            Command::DiskDetect { .. } => "disk-detect",
            Command::AlphaFit { .. } => "alpha-fit",
            Command::PshCertify { .. } => "psh-certify",
            Command::TubeSandwich { .. } => "tube-sandwich",
            Command::Report { .. } => "report",
        }
    }
}
