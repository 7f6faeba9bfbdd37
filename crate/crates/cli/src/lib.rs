//! Command-line front end for `besselspec-core`.
//!
//! Every subcommand parses its inputs, calls the library and writes one table.
//! Exit codes: 0 success, 1 usage error, 2 numerical failure.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use besselspec_core::specfun::AngularMomentum;
use besselspec_core::potential::PotentialSpec;
use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
pub mod potential_file;
pub mod sweep;
pub mod table;
mod verify;

use potential_file::{Endpoint, PotentialFile, QField, QPiece};
use table::Table;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
        }
    }
}

impl From<besselspec_core::Error> for CliError {
    fn from(e: besselspec_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "besselspec", version, about = "Spectral and scattering numerics for perturbed Bessel operators")]
pub struct Cli {
    #[command(flatten)]
    pub potential: PotentialArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct PotentialArgs {
    /// JSON potential file; overrides --l/--gamma/--q/--b.
    #[arg(long, global = true)]
    pub potential: Option<PathBuf>,
    /// Angular momentum l >= -1/2.
    #[arg(long, global = true, allow_hyphen_values = true, default_value_t = 0.0)]
    pub l: f64,
    /// Coulomb coefficient of gamma/x.
    #[arg(long, global = true, allow_hyphen_values = true, default_value_t = 0.0)]
    pub gamma: f64,
    /// free | constant:c | well:value,width | exp-decay[:amp,rate] | power:coef,exp. Repeat to add terms.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub q: Vec<String>,
    /// Right endpoint: a number or "inf".
    #[arg(long, global = true, default_value = "inf")]
    pub b: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    Auto,
    Jost,
    String,
    Truncated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ThetaRouteArg {
    Iterate,
    FreeStart,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    TheoremMain,
    EigenAsymp,
    StringIdentity,
    Roundtrip,
    Wronskians,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Regular solution phi(z, x) and its derivative.
    Phi {
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long)]
        x: String,
    },
    /// Non-principal solution theta(z, x).
    Theta {
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long)]
        x: String,
        #[arg(long, value_enum, default_value_t = ThetaRouteArg::Iterate)]
        route: ThetaRouteArg,
    },
    /// Jost function f(k), g(k); with --x, the Jost solution f(k, x).
    Jost {
        #[arg(long, allow_hyphen_values = true)]
        k: String,
        #[arg(long)]
        x: Option<String>,
    },
    /// Weyl function m(z).
    M {
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        beta: f64,
        #[arg(long, value_enum, default_value_t = RouteArg::Auto)]
        route: RouteArg,
    },
    /// Spectral density on the continuous spectrum.
    Density {
        #[arg(long)]
        lambda: String,
    },
    /// Spectral function rho(lambda), normalized to vanish at 0.
    Rho {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        beta: f64,
    },
    /// Eigenvalues in a window.
    Eigen {
        #[arg(long, allow_hyphen_values = true)]
        window: String,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        beta: f64,
    },
    /// Norming constants at given eigenvalues, or at all eigenvalues in --window.
    Norming {
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        beta: f64,
    },
    /// Phase shift delta(k), continued from large k.
    Phase {
        #[arg(long)]
        k: String,
    },
    /// Scattering matrix S(k).
    Smatrix {
        #[arg(long)]
        k: String,
    },
    /// Rebuild |f| from the phase shift and bound states and compare with the direct value.
    Reconstruct {
        /// Evaluation points.
        #[arg(long, default_value = "0.5:20:40")]
        k: String,
    },
    /// Liouville transform to a string: M(z), the Bessel-side m~(z) and the string data.
    Krein {
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true)]
        lambda0: Option<f64>,
    },
    /// Limit order of the string mass function; --power uses R = xi^alpha instead of the potential.
    LimitOrder {
        #[arg(long)]
        power: Option<f64>,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        beta: f64,
    },
    /// Bundled verification suites.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Spectral and scattering data of two potentials side by side.
    Compare {
        /// Second potential file.
        #[arg(long)]
        other: Option<PathBuf>,
        /// Second potential inline; same syntax as --q.
        #[arg(long, allow_hyphen_values = true)]
        other_q: Vec<String>,
        /// Interval (0, c) on which the potentials are compared.
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value = "0.5:20:40")]
        k: String,
    },
}

impl PotentialArgs {
    fn document(&self) -> Result<PotentialFile, CliError> {
        if let Some(path) = &self.potential {
            return read_potential(path);
        }
        Ok(PotentialFile { l: self.l, gamma: self.gamma, q: inline_q(&self.q)?, b: Endpoint::parse(&self.b)? })
    }

    pub fn spec(&self) -> Result<PotentialSpec, CliError> {
        self.document()?.to_spec()
    }

    pub fn angular(&self) -> Result<AngularMomentum, CliError> {
        Ok(self.spec()?.l)
    }
}

fn inline_q(items: &[String]) -> Result<QField, CliError> {
    let pieces = items.iter().map(|s| QPiece::parse_inline(s)).collect::<Result<Vec<_>, _>>()?;
    Ok(match pieces.len() {
        0 => QField::One(QPiece::Free),
        1 => QField::One(pieces.into_iter().next().unwrap()),
        _ => QField::Sum(pieces),
    })
}

pub fn read_potential(path: &std::path::Path) -> Result<PotentialFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("--potential {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("--potential {}: {e}", path.display())))
}

/// Worker count from `BESSELSPEC_THREADS`, defaulting to the machine's parallelism.
fn thread_count() -> Result<usize, CliError> {
    match std::env::var("BESSELSPEC_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Usage(format!("BESSELSPEC_THREADS must be a positive integer, got '{v}'"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// The table and whether every check it carries passed.
fn execute(cli: &Cli) -> Result<(Table, bool), CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count()?)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Verify { suite } => verify::run(*suite, &cli.potential),
        other => Ok((commands::run(other, &cli.potential)?, true)),
    })
}

/// Parses `args` (program name first), runs the subcommand and writes its table to
/// `out` or to `--output`. Diagnostics go to standard error.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            if code == 0 {
                let _ = write!(out, "{e}");
            } else {
                eprint!("{e}");
            }
            return code;
        }
    };
    let (table, passed) = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("besselspec: {e}");
            return e.exit_code();
        }
    };
    let written = match &cli.output.output {
        Some(path) => std::fs::File::create(path).and_then(|mut f| emit(&table, cli.output.format, &mut f)),
        None => emit(&table, cli.output.format, out),
    };
    match written {
        // a failed verification is a numerical failure
        Ok(()) if passed => 0,
        Ok(()) => 2,
        Err(e) => {
            eprintln!("besselspec: cannot write output: {e}");
            1
        }
    }
}

fn emit(table: &Table, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
    match format {
        Format::Csv => table.write_csv(out),
        Format::Json => table.write_json(out),
    }
}
