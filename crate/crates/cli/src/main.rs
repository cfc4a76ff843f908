//! `varband`: reports on variable-bandwidth Paley-Wiener spaces for
//! piecewise-constant bandwidth profiles.
//!
//! Exit codes: 0 success, 1 configuration/validation error, 2 numerical
//! failure, 3 verification failure.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// A failed run, classified for the exit code.
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Numerical(String),
    Verification(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Numerical(_) => 2,
            Failure::Verification(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Numerical(m) | Failure::Verification(m) => m,
        }
    }
}

impl From<varband::Error> for Failure {
    fn from(e: varband::Error) -> Self {
        use varband::Error::*;
        let msg = e.to_string();
        match e {
            InvalidProfile(_) | InvalidSpectrum(_) | IndexOutOfRange { .. }
            | NonPositiveSpectralParameter(_) | ShapeMismatch(_) | DuplicatePoints(..) => {
                Failure::Validation(msg)
            }
            QuadratureNonConvergence { .. } | SeriesUnavailable(_) | SeriesRatioOutOfRange(_)
            | RankDeficient | ExcessImaginary(_) | InternalConsistency(_) => {
                Failure::Numerical(msg)
            }
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Validation(format!("io error: {e}"))
    }
}

pub type CliResult<T> = Result<T, Failure>;

#[derive(Parser)]
#[command(name = "varband", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Bandwidth profile JSON: `{"knots": [t_1, …], "levels": [p_0, …]}`.
/// Spectrum JSON: `{"intervals": [[a, b], …]}`.
#[derive(Args, Clone)]
struct ConfigArgs {
    /// Path to the bandwidth-profile JSON.
    #[arg(long)]
    profile: PathBuf,
    /// Path to the spectral-set JSON.
    #[arg(long)]
    spectrum: Option<PathBuf>,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum JModeArg {
    Auto,
    Series,
    Quadrature,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum KernelModeArg {
    Auto,
    Generic,
    Closed,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum KernelOutput {
    Grid,
    Slice,
    Diag,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral density κ on a u-grid (CSV) plus its cosine view (JSON).
    Kappa {
        #[command(flatten)]
        config: ConfigArgs,
        /// u-grid as start:stop:count.
        #[arg(long, default_value = "0.05:20:400", allow_hyphen_values = true)]
        grid: String,
        /// Where to write the cosine view; defaults to `<out>.cosine.json`.
        #[arg(long)]
        cosine_out: Option<PathBuf>,
    },
    /// The integral J(s) over an s-range (CSV: s, Re, Im, M, bound).
    Jfun {
        #[command(flatten)]
        config: ConfigArgs,
        /// s-grid as start:stop:count.
        #[arg(long, default_value = "-50:50:2001", allow_hyphen_values = true)]
        s_range: String,
        #[arg(long, value_enum, default_value_t = JModeArg::Auto)]
        j_mode: JModeArg,
    },
    /// Kernel values: full grid, a slice k(x0, ·), or the diagonal (CSV).
    Kernel {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, value_enum)]
        mode: KernelOutput,
        /// Evaluation grid as start:stop:count.
        #[arg(long, default_value = "-10:10:41", allow_hyphen_values = true)]
        grid: String,
        /// Slice abscissa for `--mode slice`.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        x0: f64,
        #[arg(long, value_enum, default_value_t = KernelModeArg::Auto)]
        kernel_mode: KernelModeArg,
        #[arg(long, value_enum, default_value_t = JModeArg::Auto)]
        j_mode: JModeArg,
    },
    /// Windowed Beurling densities of a point set (JSON report).
    Density {
        #[command(flatten)]
        config: ConfigArgs,
        /// Point file: one float per line, or CSV with an `x` column.
        #[arg(long)]
        points: PathBuf,
        /// Ball radii, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        radii: Vec<f64>,
        /// Center-grid spacing (default min(0.1, r/100)).
        #[arg(long)]
        center_spacing: Option<f64>,
    },
    /// Averaged kernel trace over [-r, r] per radius (CSV).
    Trace {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        radii: Vec<f64>,
        /// Diagonal-quadrature budget per oscillation half-period.
        #[arg(long, default_value_t = 30)]
        quad_points: usize,
    },
    /// Frame/interpolation probes over densities and windows (JSON).
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        /// Density factors relative to the critical density.
        #[arg(long, value_delimiter = ',', default_value = "0.6,1.5")]
        factors: Vec<f64>,
        /// Window half-widths.
        #[arg(long, value_delimiter = ',', default_value = "20,40,80")]
        windows: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Identity, positivity and series-bound checks (JSON; exit 3 on fail).
    Verify {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Perturb the connection table first (negative control).
        #[arg(long, hide = true)]
        corrupt: bool,
    },
}

fn main() -> ExitCode {
    // clap's own exit code for usage errors is 2, which this tool reserves
    // for numerical failures; fold usage problems into the validation code
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.exit_code() == 0 => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Kappa {
            config,
            grid,
            cosine_out,
        } => commands::kappa(config, &grid, cosine_out),
        Command::Jfun {
            config,
            s_range,
            j_mode,
        } => commands::jfun(config, &s_range, j_mode),
        Command::Kernel {
            config,
            mode,
            grid,
            x0,
            kernel_mode,
            j_mode,
        } => commands::kernel(config, mode, &grid, x0, kernel_mode, j_mode),
        Command::Density {
            config,
            points,
            radii,
            center_spacing,
        } => commands::density(config, &points, &radii, center_spacing),
        Command::Trace {
            config,
            radii,
            quad_points,
        } => commands::trace(config, &radii, quad_points),
        Command::Sweep {
            config,
            factors,
            windows,
            trials,
            seed,
        } => commands::sweep(config, &factors, &windows, trials, seed),
        Command::Verify {
            config,
            seed,
            corrupt,
        } => commands::verify(config, seed, corrupt),
    }
}
