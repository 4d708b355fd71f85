use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "expsum", version, about = "Zero-free regions, critical strips and zero counts of exponential sums")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every command that reads a problem file.
#[derive(Debug, Args)]
pub struct Common {
    /// Problem file: {"terms": [{"re": .., "im": .., "freq": ..}, ...]}
    #[arg(long)]
    pub problem: PathBuf,
    /// Output directory (created if missing)
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub csv: bool,
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Window {
    #[arg(long, allow_hyphen_values = true)]
    pub y_lo: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub y_hi: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Zero-free regions and critical strips
    Analyze {
        #[command(flatten)]
        common: Common,
    },
    /// Certified zero count in a rectangle
    Count {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        window: Window,
        /// Restrict to one critical strip (default: span all strips)
        #[arg(long)]
        strip: Option<usize>,
        #[arg(long, allow_hyphen_values = true, requires = "x_hi")]
        x_lo: Option<f64>,
        #[arg(long, allow_hyphen_values = true, requires = "x_lo")]
        x_hi: Option<f64>,
    },
    /// Locate zeros in a window
    Zeros {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        window: Window,
        /// Restrict to one critical strip (default: all strips)
        #[arg(long)]
        strip: Option<usize>,
    },
    /// Per-strip counting law and Langer's bound
    Density {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        strip: Option<usize>,
        /// Heights r, comma separated (default: jittered geometric grid)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        r_grid: Option<Vec<f64>>,
        #[arg(long, default_value_t = 10.0)]
        r_min: f64,
        #[arg(long, default_value_t = 2000.0)]
        r_max: f64,
        #[arg(long, default_value_t = 40)]
        r_count: usize,
        /// Lower edge of the counting rectangles
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        y0: f64,
    },
    /// Backlund's bound for the segment z1 -> z2
    Backlund {
        #[command(flatten)]
        common: Common,
        /// Start point as re,im
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        z1: Vec<f64>,
        /// End point as re,im
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        z2: Vec<f64>,
        #[arg(long)]
        radius: f64,
    },
    /// Disc-avoidance experiment
    Disc {
        #[command(flatten)]
        common: Common,
        /// Enumerate zeros with |z| up to this modulus
        #[arg(long, default_value_t = 1000.0)]
        horizon: f64,
        #[arg(long, default_value_t = 64)]
        lines: usize,
        /// First disc index entering the measure estimate
        #[arg(long, default_value_t = 100)]
        cutoff: usize,
        /// Only discs beyond this modulus count as line hits
        #[arg(long, default_value_t = 100.0)]
        hit_modulus: f64,
    },
    /// Decomposition, zeros and Langer check in one JSON report
    Report {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        window: Window,
    },
    /// Check a decomposition JSON written by `analyze`
    Validate {
        #[arg(long)]
        input: PathBuf,
    },
}
