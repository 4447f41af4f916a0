//! `concordia`: measures, region queries, synthesis and plot data for
//! copulas given as expression JSON.
//!
//! stdout carries only JSON, CSV or OBJ; diagnostics go to stderr. Exit codes
//! are listed in [`error::exit`].

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use concordia_core::Scalar;

use error::exit;

#[derive(Parser)]
#[command(name = "concordia", version, about = "Concordance measures and their attainable region")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the six measures of an expression file.
    Measures {
        file: PathBuf,
        /// `exact`, `cb:<n>` or `mc:<samples>:<seed>`.
        #[arg(long, default_value = "exact", value_parser = parse_mode)]
        mode: Mode,
    },
    /// Membership, τ bounds and mesh export for the region.
    Region {
        #[command(subcommand)]
        command: RegionCommand,
    },
    /// Build a copula with the given (φ, γ, τ).
    Synthesize {
        #[arg(value_parser = parse_scalar, allow_hyphen_values = true)]
        phi: Scalar,
        #[arg(value_parser = parse_scalar, allow_hyphen_values = true)]
        gamma: Scalar,
        #[arg(value_parser = parse_scalar, allow_hyphen_values = true)]
        tau: Scalar,
        /// Where to write the expression JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = "CONCORDIA_DEFAULT_TOL", default_value_t = concordia_core::region::DEFAULT_TOL)]
        tol: f64,
    },
    /// Closed forms against the checkerboard and Monte Carlo estimators.
    OracleCompare {
        file: PathBuf,
        /// Checkerboard resolution.
        #[arg(long, default_value_t = 1024)]
        n: usize,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Plot data: `plot <FILE> mass|diag|odiag` or `plot polyhedron`.
    Plot {
        /// Expression file, or `polyhedron` on its own.
        target: String,
        what: Option<PlotKind>,
        /// `csv` or `json` for segments and sections, `json` or `obj` for the mesh.
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

#[derive(Subcommand)]
enum RegionCommand {
    /// Status and active or violated constraints of a point.
    Check {
        #[arg(value_parser = parse_scalar, allow_hyphen_values = true)]
        phi: Scalar,
        #[arg(value_parser = parse_scalar, allow_hyphen_values = true)]
        gamma: Scalar,
        #[arg(value_parser = parse_scalar, allow_hyphen_values = true)]
        tau: Scalar,
        #[arg(long, env = "CONCORDIA_DEFAULT_TOL", default_value_t = concordia_core::region::DEFAULT_TOL)]
        tol: f64,
    },
    /// `[τ_min, τ_max]` over the region at fixed (φ, γ).
    Bounds {
        #[arg(value_parser = parse_scalar, allow_hyphen_values = true)]
        phi: Scalar,
        #[arg(value_parser = parse_scalar, allow_hyphen_values = true)]
        gamma: Scalar,
        #[arg(long, env = "CONCORDIA_DEFAULT_TOL", default_value_t = concordia_core::region::DEFAULT_TOL)]
        tol: f64,
    },
    /// Vertices and faces of the region.
    Export {
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Checkerboard(usize),
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Obj,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    Mass,
    Diag,
    Odiag,
    Polyhedron,
}

fn parse_scalar(text: &str) -> Result<Scalar, String> {
    text.parse::<Scalar>().map_err(|_| format!("expected a decimal or p/q rational, got {text:?}"))
}

fn parse_mode(text: &str) -> Result<Mode, String> {
    let bad = || format!("expected exact, cb:<n> or mc:<samples>:<seed>, got {text:?}");
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        ["exact"] => Ok(Mode::Exact),
        ["cb", n] => match n.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Mode::Checkerboard(n)),
            _ => Err(bad()),
        },
        ["mc", samples, seed] => match (samples.parse::<usize>(), seed.parse::<u64>()) {
            (Ok(samples), Ok(seed)) if samples > 1 => Ok(Mode::MonteCarlo { samples, seed }),
            _ => Err(bad()),
        },
        _ => Err(bad()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Measures { file, mode } => commands::measures(&file, mode),
        Command::Region { command } => match command {
            RegionCommand::Check { phi, gamma, tau, tol } => commands::region_check(phi, gamma, tau, tol),
            RegionCommand::Bounds { phi, gamma, tol } => commands::region_bounds(phi, gamma, tol),
            RegionCommand::Export { format, out } => commands::region_export(format, out.as_deref()),
        },
        Command::Synthesize { phi, gamma, tau, out, tol } => commands::synthesize(phi, gamma, tau, out.as_deref(), tol),
        Command::OracleCompare { file, n, samples, seed, format } => {
            commands::oracle_compare(&file, n, samples, seed, format)
        }
        Command::Plot { target, what, format } => match what {
            Some(what) => commands::plot(Some(std::path::Path::new(&target)), what, format),
            None if target == "polyhedron" => commands::plot(None, PlotKind::Polyhedron, format),
            None => Err(error::CliError::Argument { what: "plot kind after the file", text: String::new() }),
        },
    };
    match outcome {
        Ok(text) => {
            print!("{text}");
            ExitCode::from(exit::OK)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_parse() {
        assert_eq!(parse_mode("exact"), Ok(Mode::Exact));
        assert_eq!(parse_mode("cb:64"), Ok(Mode::Checkerboard(64)));
        assert_eq!(parse_mode("mc:1000:7"), Ok(Mode::MonteCarlo { samples: 1000, seed: 7 }));
        for bad in ["cb", "cb:0", "cb:x", "mc:10", "mc:1:-1", "exactly"] {
            assert!(parse_mode(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn numbers_keep_their_arithmetic() {
        assert!(parse_scalar("-1/3").unwrap().is_exact());
        assert!(parse_scalar("2").unwrap().is_exact());
        assert!(!parse_scalar("0.25").unwrap().is_exact());
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("half").is_err());
    }

    #[test]
    fn cli_is_well_formed() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
