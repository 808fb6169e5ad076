use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gauss_frames::format::to_json_string;
use gauss_frames::{Error, Result};
use gauss_frames_cli::commands::{self, MethodChoice, WignerMode};
use gauss_frames_cli::config::ProblemConfig;

/// Gaussian Gabor frames: construction, frame bounds, threshold sweeps,
/// Wigner dumps and invariant checks.
#[derive(Parser)]
#[command(name = "gauss-frames", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print S, G, its symplectic spectrum, U, G^{-1/2}, verdicts and the lattice head.
    Construct {
        #[arg(long)]
        config: PathBuf,
    },
    /// Estimate frame bounds of the constructed system.
    Bounds {
        #[arg(long)]
        config: PathBuf,
        /// spectrum, series or both.
        #[arg(long, default_value = "spectrum")]
        method: String,
        /// Estimate the deformed system directly instead of its rectangular reduction.
        #[arg(long)]
        no_reduce: bool,
    },
    /// Sweep the density α_jβ_j of one axis and emit CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated α_jβ_j values.
        #[arg(long, allow_hyphen_values = true)]
        products: String,
        /// 1-based axis to vary.
        #[arg(long, default_value_t = 1)]
        axis: usize,
        #[arg(long, default_value = "spectrum")]
        method: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Dump the window's Wigner function as CSV.
    Wigner {
        #[arg(long)]
        config: PathBuf,
        /// analytic or numeric.
        #[arg(long, default_value = "analytic")]
        mode: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the invariant suites; exit status 0 iff all pass.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// all, symplectic, wigner or frames.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_products(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| Error::InvalidConfig(format!("cannot parse product {t:?}"))))
        .collect()
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn line(text: &str) -> String {
    format!("{text}\n")
}

/// Runs a command and returns the exit code for a successful run.
fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Construct { config } => {
            let cfg = ProblemConfig::from_path(&config)?;
            emit(&line(&commands::cmd_construct(&cfg)?), None)?;
        }
        Command::Bounds {
            config,
            method,
            no_reduce,
        } => {
            let method = MethodChoice::parse(&method)?;
            let cfg = ProblemConfig::from_path(&config)?;
            emit(&line(&commands::cmd_bounds(&cfg, method, !no_reduce)?), None)?;
        }
        Command::Sweep {
            config,
            products,
            axis,
            method,
            output,
        } => {
            let method = MethodChoice::parse(&method)?;
            let products = parse_products(&products)?;
            let cfg = ProblemConfig::from_path(&config)?;
            emit(&commands::cmd_sweep(&cfg, &products, axis, method)?, output.as_deref())?;
        }
        Command::Wigner { config, mode, output } => {
            let mode = WignerMode::parse(&mode)?;
            let cfg = ProblemConfig::from_path(&config)?;
            let out = commands::cmd_wigner(&cfg, mode)?;
            match output {
                Some(path) => {
                    emit(&out.csv, Some(&path))?;
                    emit(&line(&out.summary), None)?;
                }
                None => {
                    emit(&out.csv, None)?;
                    eprintln!("{}", out.summary);
                }
            }
        }
        Command::Verify { config, suite, seed } => {
            let cfg = ProblemConfig::from_path(&config)?;
            let outcome = commands::cmd_verify(&cfg, &suite, seed)?;
            emit(&line(&outcome.summary), None)?;
            return Ok(if outcome.passed { 0 } else { 1 });
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let doc = serde_json::json!({
                "error": { "kind": "invalid-arguments", "message": e.to_string().trim(), "exit_code": 2 }
            });
            eprintln!("{}", to_json_string(&doc));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", commands::error_json(&e));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
