//! Flag parsing, JSON config merging, and the resolved run configuration.
//!
//! Precedence is strict: command-line flags beat config-file fields, which
//! beat built-in defaults. Unknown flags and unknown config keys are both
//! rejected with a one-line diagnostic (exit code 2).

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use projlog_core::Suite;

/// Numerical toolkit for logarithmic potentials on complex affine and
/// projective space: kernel/potential evaluation, regularized
/// Monge-Ampere densities, atom diagnostics, Riesz integrals,
/// concentration-dimension estimates, critical exponents, and a
/// self-verification suite.
#[derive(Parser, Debug)]
#[command(
    name = "projlog",
    version,
    after_help = "Grid evaluation parallelizes across rows; set RAYON_NUM_THREADS to pin the \
                  thread count. Output ordering is canonical (row-major) regardless of \
                  execution order, and identical configuration + seed yields byte-identical \
                  output."
)]
pub struct Cli {
    /// JSON config file; explicit flags override its fields.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Measure description file (JSON, atomic points or a sampling family).
    #[arg(long, global = true, value_name = "FILE")]
    pub measure: Option<PathBuf>,

    /// Complex dimension (1, 2, or 3); inferred from the measure if omitted.
    #[arg(long, global = true)]
    pub n: Option<usize>,

    /// Regularization scale (eps >= 0; derivatives need eps > 0).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub eps: Option<f64>,

    /// Grid slice "lo:hi:points" over (Re z1, Im z1).
    #[arg(
        long,
        global = true,
        allow_hyphen_values = true,
        value_name = "LO:HI:PTS"
    )]
    pub grid: Option<String>,

    /// Fixed real coordinates for the remaining axes, comma separated
    /// (default all zero).
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub fix: Option<Vec<f64>>,

    /// Radius list: the eps schedule for atom-scan, or "r_lo,r_hi" for
    /// dimension.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub radii: Option<Vec<f64>>,

    /// Riesz exponent alpha.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<f64>,

    /// L^p exponent list for the riesz refinement probe.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub p: Option<Vec<f64>>,

    /// RNG seed for verification suites and family sampling defaults.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output file (stdout if omitted).
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    /// Output format for tabular commands.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a potential (U, V, or G) on a grid slice.
    Potential {
        /// Which potential: u (unregularized affine), v (projectivized,
        /// honors --eps), g (projective Green-type, needs a chart).
        #[arg(long, value_enum)]
        kind: Option<PotKind>,
        /// Chart index for kind g (0..=n).
        #[arg(long)]
        chart: Option<usize>,
    },
    /// k-Hessian density of the regularized potential on a grid slice.
    MaDensity {
        /// Hessian order k in 1..=n (default n: full Monge-Ampere).
        #[arg(long)]
        k: Option<usize>,
    },
    /// Ball-mass diagnostic of the Monge-Ampere measure near a point.
    AtomScan {
        /// Scan center, comma-separated real coordinates (default: the
        /// heaviest atom of the measure).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        at: Option<Vec<f64>>,
        /// Ball radius as a multiple of eps.
        #[arg(long)]
        radius_factor: Option<f64>,
    },
    /// Riesz potential J_{mu,alpha} on a grid slice, or the L^p
    /// refinement probe when --p is given.
    Riesz {
        /// Grid resolutions for the L^p probe.
        #[arg(long, value_delimiter = ',')]
        resolutions: Option<Vec<usize>>,
    },
    /// Concentration-dimension estimate from the ball-mass profile.
    Dimension {
        /// Number of logarithmically spaced radii in the fit window.
        #[arg(long)]
        num_radii: Option<usize>,
    },
    /// Critical integrability exponents for a concentration dimension.
    Exponents {
        /// Lower concentration dimension gamma (0 <= gamma <= 2n).
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<f64>,
    },
    /// Library constants with their independent cross-checks.
    Constants,
    /// Run the self-verification suites and print the PASS/FAIL table.
    Verify {
        /// Suite: geometry, kernels, potentials, riesz, or all.
        #[arg(long)]
        suite: Option<String>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum PotKind {
    U,
    V,
    G,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// On-disk config: every field optional, unknown keys rejected.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub measure: Option<PathBuf>,
    pub n: Option<usize>,
    pub eps: Option<f64>,
    pub grid: Option<String>,
    pub fix: Option<Vec<f64>>,
    pub radii: Option<Vec<f64>>,
    pub alpha: Option<f64>,
    pub p: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub kind: Option<String>,
    pub chart: Option<usize>,
    pub k: Option<usize>,
    pub at: Option<Vec<f64>>,
    pub radius_factor: Option<f64>,
    pub resolutions: Option<Vec<usize>>,
    pub num_radii: Option<usize>,
    pub gamma: Option<f64>,
    pub suite: Option<String>,
}

/// A square evaluation window [lo, hi]^2 over (Re z1, Im z1).
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct GridSlice {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl GridSlice {
    pub fn axis(&self, i: usize) -> f64 {
        self.lo + (self.hi - self.lo) * i as f64 / (self.points - 1) as f64
    }
}

impl FromStr for GridSlice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || format!("invalid grid '{s}': expected lo:hi:points, e.g. -2:2:101");
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].parse().map_err(|_| bad())?;
        let points: usize = parts[2].parse().map_err(|_| bad())?;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(format!("invalid grid '{s}': need finite lo < hi"));
        }
        if !(2..=4096).contains(&points) {
            return Err(format!("invalid grid '{s}': points must be in 2..=4096"));
        }
        Ok(GridSlice { lo, hi, points })
    }
}

/// Which subcommand is running, after merging.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Potential,
    MaDensity,
    AtomScan,
    Riesz,
    Dimension,
    Exponents,
    Constants,
    Verify,
}

/// Fully resolved run configuration: defaults applied, inputs validated.
#[derive(Debug)]
pub struct RunConfig {
    pub command: CommandKind,
    pub measure: Option<PathBuf>,
    pub n: Option<usize>,
    pub eps: f64,
    pub grid: GridSlice,
    pub fix: Option<Vec<f64>>,
    pub radii: Vec<f64>,
    pub alpha: Option<f64>,
    pub p: Vec<f64>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub kind: PotKind,
    pub chart: usize,
    pub k: Option<usize>,
    pub at: Option<Vec<f64>>,
    pub radius_factor: f64,
    pub resolutions: Vec<usize>,
    pub num_radii: usize,
    pub gamma: Option<f64>,
    pub suite: Suite,
}

fn parse_format(s: &str) -> Result<Format, String> {
    match s {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        other => Err(format!("invalid format '{other}': expected csv or json")),
    }
}

fn parse_kind(s: &str) -> Result<PotKind, String> {
    match s {
        "u" => Ok(PotKind::U),
        "v" => Ok(PotKind::V),
        "g" => Ok(PotKind::G),
        other => Err(format!(
            "invalid potential kind '{other}': expected u, v, or g"
        )),
    }
}

/// Merge flags over the optional config file and validate. All failure
/// modes return a one-line message destined for exit code 2.
pub fn parse_config(cli: Cli) -> Result<RunConfig, String> {
    let file: FileConfig = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            serde_json::from_str(&text)
                .map_err(|e| format!("invalid config {}: {e}", path.display()))?
        }
        None => FileConfig::default(),
    };

    let (
        command,
        flag_kind,
        flag_chart,
        flag_k,
        flag_at,
        flag_rf,
        flag_res,
        flag_nr,
        flag_gamma,
        flag_suite,
    ) = match cli.command {
        Command::Potential { kind, chart } => (
            CommandKind::Potential,
            kind,
            chart,
            None,
            None,
            None,
            None,
            None,
            None,
            None,
        ),
        Command::MaDensity { k } => (
            CommandKind::MaDensity,
            None,
            None,
            k,
            None,
            None,
            None,
            None,
            None,
            None,
        ),
        Command::AtomScan { at, radius_factor } => (
            CommandKind::AtomScan,
            None,
            None,
            None,
            at,
            radius_factor,
            None,
            None,
            None,
            None,
        ),
        Command::Riesz { resolutions } => (
            CommandKind::Riesz,
            None,
            None,
            None,
            None,
            None,
            resolutions,
            None,
            None,
            None,
        ),
        Command::Dimension { num_radii } => (
            CommandKind::Dimension,
            None,
            None,
            None,
            None,
            None,
            None,
            num_radii,
            None,
            None,
        ),
        Command::Exponents { gamma } => (
            CommandKind::Exponents,
            None,
            None,
            None,
            None,
            None,
            None,
            None,
            gamma,
            None,
        ),
        Command::Constants => (
            CommandKind::Constants,
            None,
            None,
            None,
            None,
            None,
            None,
            None,
            None,
            None,
        ),
        Command::Verify { suite } => (
            CommandKind::Verify,
            None,
            None,
            None,
            None,
            None,
            None,
            None,
            None,
            suite,
        ),
    };

    let n = cli.n.or(file.n);
    if let Some(n) = n {
        if !(1..=3).contains(&n) {
            return Err(format!("n must be 1, 2, or 3, got {n}"));
        }
    }

    let eps = cli.eps.or(file.eps).unwrap_or(0.0);
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(format!("eps must be finite and nonnegative, got {eps}"));
    }
    if command == CommandKind::MaDensity && eps == 0.0 {
        return Err("derivatives require eps > 0".into());
    }

    let grid: GridSlice = cli
        .grid
        .or(file.grid)
        .as_deref()
        .unwrap_or("-2:2:101")
        .parse()?;

    let format = match cli.format {
        Some(f) => f,
        None => match file.format.as_deref() {
            Some(s) => parse_format(s)?,
            None => Format::Csv,
        },
    };

    let kind = match flag_kind {
        Some(k) => k,
        None => match file.kind.as_deref() {
            Some(s) => parse_kind(s)?,
            None => PotKind::V,
        },
    };

    let suite = match flag_suite.or(file.suite).as_deref() {
        Some(s) => Suite::from_str(s).map_err(|e| e.to_string())?,
        None => Suite::All,
    };

    let radii = cli.radii.or(file.radii).unwrap_or_default();
    let radius_factor = flag_rf.or(file.radius_factor).unwrap_or(10.0);
    if !(radius_factor.is_finite() && radius_factor > 0.0) {
        return Err(format!(
            "radius-factor must be finite and positive, got {radius_factor}"
        ));
    }
    let num_radii = flag_nr.or(file.num_radii).unwrap_or(8);

    Ok(RunConfig {
        command,
        measure: cli.measure.or(file.measure),
        n,
        eps,
        grid,
        fix: cli.fix.or(file.fix),
        radii,
        alpha: cli.alpha.or(file.alpha),
        p: cli.p.or(file.p).unwrap_or_default(),
        seed: cli.seed.or(file.seed).unwrap_or(1),
        out: cli.out.or(file.out),
        format,
        kind,
        chart: flag_chart.or(file.chart).unwrap_or(0),
        k: flag_k.or(file.k),
        at: flag_at.or(file.at),
        radius_factor,
        resolutions: flag_res
            .or(file.resolutions)
            .unwrap_or_else(|| vec![32, 64, 128, 256]),
        num_radii,
        gamma: flag_gamma.or(file.gamma),
        suite,
    })
}
