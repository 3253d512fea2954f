//! Command-line front end.
//!
//! Exit codes: 0 success, 2 validation/recovery failure (structured JSON on
//! stderr), 1 internal error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use thetarecon_core::error::Error;
use thetarecon_core::pipeline::{
    run_full_file, run_generate_file, run_recover_file, run_verify_file, BackendKind,
    GenerateParams, RunConfig,
};
use thetarecon_core::scalar::{parse_scalar, Rat};

#[derive(Parser)]
#[command(name = "thetarecon", version, about = "Curve reconstruction from theta hyperplanes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum Backend {
    Exact,
    Float,
}

#[derive(Args, Debug)]
struct BackendArgs {
    /// Scalar backend.
    #[arg(long, value_enum, default_value = "exact")]
    backend: Backend,
    /// Relative tolerance (float backend only; defaults to 1e-8 there).
    #[arg(long)]
    tol: Option<f64>,
}

impl BackendArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        cfg.backend = match self.backend {
            Backend::Exact => BackendKind::Exact,
            Backend::Float => BackendKind::Float,
        };
        cfg.tol = match (self.backend, self.tol) {
            (Backend::Float, t) => Some(t.unwrap_or(1e-8)),
            (Backend::Exact, t) => t,
        };
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic instance with ground truth and witnesses.
    Generate {
        #[arg(long)]
        genus: usize,
        /// Comma-separated branch points (2g+2 distinct rationals); random
        /// when omitted.
        #[arg(long, value_delimiter = ',')]
        branch: Option<Vec<String>>,
        #[arg(long, env = "THETARECON_SEED", default_value_t = 0)]
        seed: u64,
        /// Number of witness points to sample.
        #[arg(long, default_value_t = 20)]
        witnesses: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recover the map, the Prym hyperplanes and the quadrics from an input
    /// file.
    Recover {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        backend: BackendArgs,
        #[arg(long, env = "THETARECON_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        restarts: u32,
    },
    /// Re-check a result file against its input.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        result: PathBuf,
        #[command(flatten)]
        backend: BackendArgs,
    },
    /// generate -> recover -> verify in one run.
    Full {
        #[arg(long)]
        genus: usize,
        #[arg(long, value_delimiter = ',')]
        branch: Option<Vec<String>>,
        #[arg(long, env = "THETARECON_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        witnesses: usize,
        #[command(flatten)]
        backend: BackendArgs,
        #[arg(long, default_value_t = 64)]
        restarts: u32,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_branch(values: &[String]) -> Result<Vec<Rat>, Error> {
    values
        .iter()
        .enumerate()
        .map(|(i, s)| parse_scalar(s, &format!("--branch[{i}]")))
        .collect()
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Generate {
            genus,
            branch,
            seed,
            witnesses,
            out,
        } => {
            let params = GenerateParams {
                genus,
                branch: branch.as_deref().map(parse_branch).transpose()?,
                seed,
                witness_count: witnesses,
            };
            run_generate_file(&params, &out)?;
            println!("wrote {}", out.display());
            Ok(())
        }
        Command::Recover {
            input,
            out,
            backend,
            seed,
            restarts,
        } => {
            let mut cfg = RunConfig {
                seed,
                max_restarts: restarts,
                ..RunConfig::default()
            };
            backend.apply(&mut cfg);
            run_recover_file(&input, &out, &cfg)?;
            println!("wrote {}", out.display());
            Ok(())
        }
        Command::Verify {
            input,
            result,
            backend,
        } => {
            let mut cfg = RunConfig::default();
            backend.apply(&mut cfg);
            let outcome = run_verify_file(&input, &result, &cfg)?;
            println!(
                "witness vanishing: {}",
                if outcome.all_vanish { "pass" } else { "FAIL" }
            );
            println!(
                "stored diagnostics: {}",
                if outcome.matches_stored {
                    "match"
                } else {
                    "MISMATCH"
                }
            );
            for m in &outcome.mismatches {
                println!("  {m}");
            }
            if outcome.all_vanish && outcome.matches_stored {
                Ok(())
            } else {
                Err(Error::BadParameter {
                    reason: "verification failed".into(),
                })
            }
        }
        Command::Full {
            genus,
            branch,
            seed,
            witnesses,
            backend,
            restarts,
            out,
        } => {
            let params = GenerateParams {
                genus,
                branch: branch.as_deref().map(parse_branch).transpose()?,
                seed,
                witness_count: witnesses,
            };
            let mut cfg = RunConfig {
                seed,
                max_restarts: restarts,
                witness_count: witnesses,
                ..RunConfig::default()
            };
            backend.apply(&mut cfg);
            run_full_file(&params, &out, &cfg)?;
            println!("wrote {}", out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let doc = json!({
                "error": e.kind(),
                "message": e.to_string(),
            });
            eprintln!("{doc}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
