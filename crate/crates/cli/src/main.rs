use std::path::PathBuf;
use std::process::ExitCode;

use bpb_cli::commands::{self, Format, ModulusArgs};
use bpb_cli::plot::{self, parse_range, PlotArgs, PlotFormat};
use bpb_cli::specfile::resolve;
use bpb_cli::{verify, CliError, Output};
use bpb_core::modulus::{DEFAULT_BUDGET, DEFAULT_SEED};
use bpb_core::squareness::{DEFAULT_MARGIN, DEFAULT_SQUARE_BUDGET};
use clap::{Parser, Subcommand, ValueEnum};

/// Bishop-Phelps-Bollobas moduli of finite-dimensional normed spaces.
///
/// SPACE is a space file or a shorthand such as `linf2`, `euclidean2`,
/// `diamond:eps=0.6`, `lp:p=3,n=2` or `l1sum:line+l1-2`.
#[derive(Parser)]
#[command(name = "bpb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveFormat {
    Csv,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Lower bound and certified upper bound at one delta.
    Modulus {
        space: String,
        delta: f64,
        #[arg(long)]
        spherical: bool,
        /// Certificate mesh (default 0.02 in 2-D, 0.05 in 3-D).
        #[arg(long)]
        mesh: Option<f64>,
        /// Distance evaluations for the lower-bound search.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: OutFormat,
        /// Write the JSON result record here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite: line, hilbert, linf2, l1sum, diamond, duality, all
    /// (or `space` with --space).
    Verify {
        suite: String,
        /// Also run generic checks on this space.
        #[arg(long)]
        space: Option<String>,
        /// Write the JSON result record here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Modulus curve over a delta grid, as CSV or SVG.
    Plot {
        space: String,
        /// Range `a..b` inside (0, 2).
        #[arg(default_value = "0.05..1.95")]
        range: String,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long)]
        spherical: bool,
        /// Certify upper bounds with this mesh (slow); otherwise the upper
        /// column is the universal cap.
        #[arg(long)]
        mesh: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: CurveFormat,
        /// Write the curve here; stdout then gets the run record.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distance of the space from containing a square (a copy of l_inf^2).
    Squareness {
        space: String,
        #[arg(long, default_value_t = DEFAULT_SQUARE_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = DEFAULT_MARGIN)]
        margin: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: OutFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Space file of the dual space.
    Dual {
        space: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn format(f: OutFormat) -> Format {
    match f {
        OutFormat::Text => Format::Text,
        OutFormat::Json => Format::Json,
    }
}

fn run(cli: Cli) -> Result<(Output, Option<PathBuf>, bool), CliError> {
    Ok(match cli.command {
        Command::Modulus { space, delta, spherical, mesh, budget, seed, format: f, out } => {
            let args = ModulusArgs { delta, spherical, mesh, budget, seed };
            (commands::modulus(&resolve(&space)?, &args, format(f))?, out, false)
        }
        Command::Verify { suite, space, out } => {
            let spec = match space.as_deref().map(resolve) {
                Some(Ok(s)) => Some(s),
                // A space that does not parse is reported as a failed check.
                Some(Err(e @ CliError::Parse(_))) => {
                    println!("FAIL  space/spec  expected parses  computed {e}");
                    return Ok((Output { stdout: String::new(), code: bpb_cli::EXIT_FAILED_CHECK, artifact: None }, None, false));
                }
                Some(Err(e)) => return Err(e),
                None => None,
            };
            (verify::verify(&suite, spec.as_ref())?, out, false)
        }
        Command::Plot { space, range, step, spherical, mesh, budget, seed, format: f, out } => {
            let (from, to) = parse_range(&range)?;
            let args = PlotArgs { from, to, step, spherical, mesh, budget, seed };
            let pf = match f {
                CurveFormat::Csv => PlotFormat::Csv,
                CurveFormat::Svg => PlotFormat::Svg,
            };
            let output = plot::plot(&resolve(&space)?, &args, pf)?;
            // Without --out the curve itself is the result.
            (output, out, true)
        }
        Command::Squareness { space, budget, margin, format: f, out } => {
            (commands::squareness(&resolve(&space)?, budget, margin, format(f))?, out, false)
        }
        Command::Dual { space, out } => (commands::dual(&resolve(&space)?)?, out, false),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((output, out, artifact_is_result)) => {
            match (&out, &output.artifact) {
                (Some(path), Some(artifact)) => {
                    if let Err(e) = std::fs::write(path, artifact) {
                        eprintln!("{}", CliError::Io(format!("{}: {e}", path.display())));
                        return ExitCode::from(bpb_cli::EXIT_PARSE as u8);
                    }
                    print!("{}", output.stdout);
                }
                (None, Some(artifact)) if artifact_is_result => print!("{artifact}"),
                _ => print!("{}", output.stdout),
            }
            if output.code == bpb_cli::EXIT_VACUOUS {
                eprintln!("certificate is vacuous at this mesh");
            }
            ExitCode::from(output.code as u8)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
