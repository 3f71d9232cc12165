use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

/// Area distances of convex polylines and analytic arcs.
#[derive(Debug, Parser)]
#[command(name = "areadist", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the inner grid of a polygon file.
    Inner {
        input: PathBuf,
        /// Highest level to build (default: the largest allowed).
        #[arg(long)]
        levels: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Continue a polygon file outward on the lattice.
    Outer {
        input: PathBuf,
        #[arg(long)]
        levels: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check the identities of a discrete grid or an analytic curve.
    Verify {
        #[arg(value_enum)]
        which: Which,
        /// Polygon file; random inputs are generated when omitted.
        input: Option<PathBuf>,
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Tolerance for finite-difference checks of smooth identities.
        #[arg(long, default_value_t = 1e-4)]
        fd_tol: f64,
        #[arg(long, default_value = "parabola")]
        curve: CurveArg,
        /// Vertex count of the random inputs.
        #[arg(long, default_value_t = 32)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sample a catalog curve into a polygon file.
    SampleCurve {
        #[arg(long)]
        curve: CurveArg,
        #[arg(long)]
        samples: usize,
        /// Parameter range `a:b` (default depends on the curve).
        #[arg(long, allow_hyphen_values = true)]
        range: Option<Range>,
        /// Sample a closed polygon (default: only the circle).
        #[arg(long)]
        closed: Option<bool>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the lattice continuation of sampled curves with the smooth chart.
    Refine {
        #[arg(long)]
        curve: CurveArg,
        /// Comma separated sample counts.
        #[arg(long, value_delimiter = ',', default_value = "11,21,41,81")]
        samples: Vec<usize>,
        #[arg(long, default_value_t = 0.3)]
        t_max: f64,
    },
    /// Minimal chord through a point, from the definition.
    Chord {
        input: PathBuf,
        /// Query point `x,y`.
        #[arg(long, allow_hyphen_values = true)]
        point: Point,
        #[arg(long, default_value_t = 256)]
        angular_samples: usize,
        #[arg(long, default_value_t = 60)]
        iters: usize,
    },
}

#[derive(Debug, clap::Args)]
struct OutputArgs {
    /// Destination file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Default: obj when `--out` ends in `.obj`, csv otherwise.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl OutputArgs {
    fn format(&self) -> Format {
        self.format.unwrap_or_else(|| match &self.out {
            Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("obj")) => Format::Obj,
            _ => Format::Csv,
        })
    }

    fn path(&self) -> Option<&Path> {
        self.out.as_deref()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Obj,
    /// Build and print the summary only.
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Which {
    Inner,
    Outer,
    Smooth,
}

#[derive(Clone, Debug)]
struct CurveArg(areadist::AnalyticCurve);

impl FromStr for CurveArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.parse()
            .map(CurveArg)
            .map_err(|e: areadist::AnalyticError| e.to_string())
    }
}

#[derive(Clone, Copy, Debug)]
struct Range(f64, f64);

impl FromStr for Range {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(':').ok_or("expected a:b")?;
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
        let (a, b) = (num(a)?, num(b)?);
        if a.partial_cmp(&b) != Some(std::cmp::Ordering::Less) {
            return Err(format!("empty range {a}:{b}"));
        }
        Ok(Range(a, b))
    }
}

#[derive(Clone, Copy, Debug)]
struct Point(f64, f64);

impl FromStr for Point {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (x, y) = s.split_once(',').ok_or("expected x,y")?;
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
        Ok(Point(num(x)?, num(y)?))
    }
}

/// Process exit statuses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Parse = 1,
    Validation = 2,
    Level = 3,
    Verify = 4,
}

/// An error with the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub status: Status,
    pub error: anyhow::Error,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

pub trait WithStatus<T> {
    fn status(self, status: Status) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> WithStatus<T> for Result<T, E> {
    fn status(self, status: Status) -> Result<T, Failure> {
        self.map_err(|e| Failure {
            status,
            error: e.into(),
        })
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(Status::Parse as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.status as u8)
        }
    }
}
