//! `pingpong`: Cartan data, contraction and separation analysis, and
//! ping-pong freeness certificates for matrices over ℝ, ℂ and ℚ_p.

mod commands;
mod report;
mod scalar;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pingpong_core::{Error, Tolerance};

use report::error_report;

/// Overrides the archimedean tolerance for accepting inputs as elements of `SL_n`.
const TOL_ENV: &str = "PINGPONG_TOL";

#[derive(Parser)]
#[command(
    name = "pingpong",
    version,
    about = "Ping-pong certificates for matrix groups over local fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel batch work (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Cartan decomposition `g = k·a·k′` and the ratio table.
    Cartan {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Contraction certificate with empirical verification.
    ContractAnalyze {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        /// Check this ε instead of the smallest one the Cartan data certifies.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Sampled estimate of the separation radius of a finite set.
    Separate {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        /// Fail if the estimate falls below this radius.
        #[arg(long)]
        r: Option<f64>,
    },
    /// Build or verify a ping-pong certificate.
    CertifyFree(CertifyArgs),
    /// Search for a relation among short reduced words.
    Falsify {
        #[arg(long)]
        gens: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
    /// Whether the logarithms of the generators generate the full Lie algebra.
    DenseCheck {
        #[arg(long)]
        gens: PathBuf,
    },
}

#[derive(Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub gens: PathBuf,
    /// Separating set (with `r` and optionally `m`), for `--build`.
    #[arg(long)]
    pub sep: Option<PathBuf>,
    /// Contracting element (with `epsilon`), for `--build`.
    #[arg(long)]
    pub gamma: Option<PathBuf>,
    #[arg(long, conflicts_with = "verify_only")]
    pub build: bool,
    #[arg(long)]
    pub verify_only: bool,
    #[arg(long)]
    pub seed: Option<u64>,
}

fn tolerance() -> Result<f64, Error> {
    match std::env::var(TOL_ENV) {
        Err(_) => Ok(Tolerance::default().rel),
        Ok(s) => s
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|t| t.is_finite() && *t > 0.0)
            .ok_or_else(|| Error::Schema {
                path: String::new(),
                message: format!("{TOL_ENV} must be a positive number, got {s:?}"),
            }),
    }
}

fn name(c: &Command) -> &'static str {
    match c {
        Command::Cartan { .. } => "cartan",
        Command::ContractAnalyze { .. } => "contract-analyze",
        Command::Separate { .. } => "separate",
        Command::CertifyFree(_) => "certify-free",
        Command::Falsify { .. } => "falsify",
        Command::DenseCheck { .. } => "dense-check",
    }
}

fn run(cli: &Cli) -> Result<report::Report, Error> {
    let tol = tolerance()?;
    match &cli.command {
        Command::Cartan { input } => commands::cartan(input, tol),
        Command::ContractAnalyze {
            input,
            samples,
            seed,
            epsilon,
        } => commands::contract_analyze(input, *samples, *seed, *epsilon, tol),
        Command::Separate {
            set,
            m,
            trials,
            seed,
            r,
        } => commands::separate(set, *m, *trials, *seed, *r, tol),
        Command::CertifyFree(a) => commands::certify_free(a, tol),
        Command::Falsify { gens, max_len } => commands::falsify(gens, *max_len, tol),
        Command::DenseCheck { gens } => commands::dense_check(gens, tol),
    }
}

fn emit(cli: &Cli, value: &serde_json::Value) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).expect("reports serialize") + "\n";
    match &cli.out {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("pingpong: {e}");
            return ExitCode::from(2);
        }
    }
    let (value, code) = match run(&cli) {
        Ok(r) => (r.to_value(), if r.pass { 0 } else { 1 }),
        Err(e) => {
            eprintln!("pingpong: {e}");
            (
                error_report(name(&cli.command), &e),
                if e.is_precondition() { 3 } else { 2 },
            )
        }
    };
    if let Err(e) = emit(&cli, &value) {
        eprintln!("pingpong: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
