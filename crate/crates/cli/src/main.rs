//! `tentflex` command-line front end.
//!
//! Exit codes: 0 on success, 2 on invalid input, 3 when a solver or
//! verification step fails, 1 on I/O errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use tentflex::density::{self, fmt17, series_density, stefan_limit_check, LimitDensity};
use tentflex::entropy::{entropy_report, identity_partial_sums, identity_tail};
use tentflex::flex::{rect_root, solve_skew, solve_unimodal};
use tentflex::ulam::{build_matrix, stationary_density, DEFAULT_TOL};
use tentflex::{entropy, Error, PlUnimodalMap, SkewTentMap, UnimodalMap};

#[derive(Parser)]
#[command(
    name = "tentflex",
    version,
    about = "Entropy and invariant densities of skew tent and unimodal maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Invariant density of a skew tent map as CSV.
    Density {
        #[arg(long)]
        s: f64,
        #[arg(long)]
        t: f64,
        /// Truncation tolerance of the density series.
        #[arg(long, default_value_t = density::DEFAULT_TOL)]
        tol: f64,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Topological and metric entropy of a skew tent map as JSON.
    Entropy {
        #[arg(long)]
        s: f64,
        #[arg(long)]
        t: f64,
    },
    /// Construct a map with topological entropy `a` and metric entropy `b`.
    Solve {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        /// Allow piecewise linear unimodal maps (needed for a below log(2)/2).
        #[arg(long)]
        unimodal: bool,
        /// Also write the result to this file.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Rectangular root of a map read from JSON.
    Root {
        #[arg(long = "in")]
        input: PathBuf,
        /// Height of the inserted plateau; defaults to half its upper limit.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Partial sums of the series identity, one row per term.
    Identity {
        #[arg(long)]
        s: f64,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        terms: usize,
    },
    /// Štefan map with f(0) = a and period 2n + 3, compared with the limit density.
    Stefan {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        n: usize,
    },
    /// Ulam density and metric entropy of a map read from JSON.
    Ulam {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        bins: usize,
        /// Write the density CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Maximum invariant density over a K x K grid of mixing maps.
    Sweep {
        #[arg(long, default_value_t = 100)]
        grid: usize,
        /// Write the full report, with every grid point, here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

/// A failed command, sorted by exit code.
#[derive(Debug)]
enum Failure {
    Invalid(anyhow::Error),
    Solver(anyhow::Error),
    Io(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::Solver(_) => 3,
        }
    }

    fn message(&self) -> String {
        let e = match self {
            Failure::Invalid(e) | Failure::Solver(e) | Failure::Io(e) => e,
        };
        format!("{e:#}")
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::SlopeOutOfRange { .. }
            | Error::NotSelfMap { .. }
            | Error::DomainError { .. }
            | Error::InvalidMap(_)
            | Error::InvalidDensity(_)
            | Error::InvalidTarget { .. }
            | Error::NotRenormalizable { .. }
            | Error::SlopeTooSmall(_) => Failure::Invalid(e.into()),
            _ => Failure::Solver(e.into()),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

fn invalid(msg: impl std::fmt::Display) -> Failure {
    Failure::Invalid(anyhow!("{msg}"))
}

fn write_file(path: &Path, contents: &str) -> Outcome {
    std::fs::write(path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::Io)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable value");
    text.push('\n');
    text
}

/// Reads a skew tent map (`s`, `t`) or a piecewise linear map
/// (`breakpoints`, `values`).
fn read_map(path: &Path) -> std::result::Result<UnimodalMap, Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Invalid)?;
    let value: Value = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(Failure::Invalid)?;
    let obj = value
        .as_object()
        .ok_or_else(|| invalid(format!("{}: expected a JSON object", path.display())))?;
    let parsed = if obj.contains_key("s") || obj.contains_key("t") {
        serde_json::from_value::<SkewTentMap>(value).map(UnimodalMap::from)
    } else if obj.contains_key("breakpoints") || obj.contains_key("values") {
        serde_json::from_value::<PlUnimodalMap>(value).map(UnimodalMap::from)
    } else {
        return Err(invalid(format!(
            "{}: expected keys s and t, or breakpoints and values",
            path.display()
        )));
    };
    parsed.map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Density { s, t, tol, csv } => {
            let map = SkewTentMap::new(s, t)?;
            let rho = series_density(&map, tol)?;
            match csv {
                Some(path) => write_file(&path, &rho.to_csv())?,
                None => print!("{}", rho.to_csv()),
            }
        }
        Command::Entropy { s, t } => {
            let map = SkewTentMap::new(s, t)?;
            print!("{}", to_json(&entropy_report(&map)?));
        }
        Command::Solve {
            a,
            b,
            unimodal,
            json,
        } => {
            let result = if unimodal {
                solve_unimodal(a, b)?
            } else {
                solve_skew(a, b)?
            };
            let text = to_json(&result);
            if let Some(path) = json {
                write_file(&path, &text)?;
            }
            print!("{text}");
        }
        Command::Root { input, eps, out } => {
            let map = read_map(&input)?;
            let root = rect_root(&map, eps)?;
            write_file(&out, &to_json(&root))?;
        }
        Command::Identity { s, t, terms } => {
            if terms == 0 {
                return Err(invalid("--terms must be positive"));
            }
            let map = SkewTentMap::new(s, t)?;
            let mut out = String::from("n,partial_sum,tail_bound\n");
            for (n, sum) in identity_partial_sums(&map, terms).iter().enumerate() {
                let _ = writeln!(out, "{n},{},{}", fmt17(*sum), fmt17(identity_tail(&map, n)));
            }
            print!("{out}");
        }
        Command::Stefan { a, n } => {
            let map = SkewTentMap::stefan(a, n)?;
            let l1 = stefan_limit_check(a, n)?;
            let limit = LimitDensity::new(a)?;
            let report = json!({
                "map": map,
                "a": a,
                "n": n,
                "plateau": limit.plateau(),
                "l1_distance": l1,
            });
            print!("{}", to_json(&report));
        }
        Command::Ulam { input, bins, csv } => {
            if bins < 64 {
                return Err(invalid(format!("--bins must be at least 64 (got {bins})")));
            }
            let map = read_map(&input)?;
            let rho = stationary_density(&build_matrix(&map, bins)?, DEFAULT_TOL)?;
            let h_mu = entropy::rohlin_entropy(&map, &rho)?;
            if let Some(path) = csv {
                write_file(&path, &rho.to_csv())?;
            }
            print!("{}", to_json(&json!({ "bins": bins, "h_mu": h_mu })));
        }
        Command::Sweep { grid, report } => {
            let sweep = density::density_sweep(grid)?;
            if let Some(path) = report {
                write_file(&path, &to_json(&sweep))?;
            }
            let summary = json!({
                "grid": sweep.grid,
                "bound": sweep.bound,
                "global_max": sweep.global_max,
                "argmax": sweep.argmax,
                "flagged": sweep.flagged.len(),
            });
            print!("{}", to_json(&summary));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
