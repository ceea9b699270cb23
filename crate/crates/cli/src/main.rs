//! `nhom-lab`: analyze maps between finite-dimensional algebras, run the
//! theorem-verification harness, and generate reproducible fixtures.
//!
//! Exit codes: 0 when every requested check passes, 1 on a failed check,
//! 2 on malformed input. `NHOM_LAB_THREADS` caps harness parallelism.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nhom_cli::generate_cmd::{self, render_json};
use nhom_cli::harness::{reports_to_json, run_verify, HarnessConfig};

#[derive(Debug, Parser)]
#[command(name = "nhom-lab")]
#[command(about = "n-homomorphisms of finite-dimensional operator algebras: \
analysis, decomposition, and randomized theorem verification")]
struct Cli {
    /// Pretty-print JSON output.
    #[arg(long, global = true)]
    pretty: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analyze a map file: star-linearity, n-multiplicativity,
    /// decomposition, complete positivity, contractivity.
    Analyze {
        /// JSON map file ({"domain": ..., "codomain": ..., "matrix": ...}).
        map_file: PathBuf,

        /// The n of the n-homomorphism check.
        #[arg(long, default_value_t = 2)]
        n: u32,

        /// Verification tolerance (relative to max(1, operand norm)).
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },

    /// Run the theorem-verification harness from a config file.
    Verify {
        /// JSON config file; missing fields take defaults.
        config_file: Option<PathBuf>,

        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,

        /// Override instances per (theorem, n, dims) cell.
        #[arg(long)]
        trials: Option<usize>,

        /// Override the tolerance.
        #[arg(long)]
        tol: Option<f64>,

        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,

        /// Report wall-clock times (omitted by default so identical runs
        /// are byte-identical).
        #[arg(long)]
        timing: bool,
    },

    /// Generate a reproducible JSON fixture.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },
}

#[derive(Debug, Subcommand)]
enum GenerateKind {
    /// A random n-potent element of a full matrix algebra.
    Npotent {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        dim: usize,
        /// Draw a self-adjoint n-potent (spectrum in Σ_n ∩ ℝ).
        #[arg(long)]
        selfadjoint: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A random n-homomorphism between direct-sum algebras.
    Nhom {
        #[arg(long)]
        n: u32,
        /// Domain block sizes, comma separated (e.g. 2,2).
        #[arg(long, value_delimiter = ',')]
        blocks: Vec<usize>,
        /// Codomain block sizes, comma separated.
        #[arg(long, value_delimiter = ',')]
        codomain: Vec<usize>,
        /// Make the instance involutive (*-linear).
        #[arg(long)]
        involutive: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A random linear map (no multiplicativity expected).
    Map {
        #[arg(long, value_delimiter = ',')]
        blocks: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        codomain: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(value: &serde_json::Value, out: Option<&PathBuf>, pretty: bool) -> Result<(), String> {
    let text = render_json(value, pretty);
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run() -> Result<bool, String> {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze { map_file, n, tol } => {
            let analysis =
                nhom_cli::analyze_file(&map_file, n, tol).map_err(|e| e.to_string())?;
            emit(&analysis.report, None, cli.pretty)?;
            Ok(analysis.pass)
        }
        Command::Verify {
            config_file,
            seed,
            trials,
            tol,
            out,
            timing,
        } => {
            let mut config: HarnessConfig = match &config_file {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
                    serde_json::from_str(&text).map_err(|e| format!("malformed config: {e}"))?
                }
                None => HarnessConfig::default(),
            };
            if let Some(s) = seed {
                config.seed = s;
            }
            if let Some(t) = trials {
                config.trials = t;
            }
            if let Some(t) = tol {
                config.tol = t;
            }
            if config.trials == 0 {
                return Err("trials must be positive".into());
            }
            let reports = run_verify(&config);
            let value = reports_to_json(&reports, timing);
            emit(&value, out.as_ref(), cli.pretty)?;
            Ok(reports.iter().all(|r| r.pass()))
        }
        Command::Generate { kind } => {
            let (value, out) = match kind {
                GenerateKind::Npotent {
                    n,
                    dim,
                    selfadjoint,
                    seed,
                    out,
                } => (
                    generate_cmd::generate_npotent(n, dim, selfadjoint, seed)
                        .map_err(|e| e.to_string())?,
                    out,
                ),
                GenerateKind::Nhom {
                    n,
                    blocks,
                    codomain,
                    involutive,
                    seed,
                    out,
                } => (
                    generate_cmd::generate_nhom(n, blocks, codomain, involutive, seed)
                        .map_err(|e| e.to_string())?,
                    out,
                ),
                GenerateKind::Map {
                    blocks,
                    codomain,
                    seed,
                    out,
                } => (
                    generate_cmd::generate_map(blocks, codomain, seed)
                        .map_err(|e| e.to_string())?,
                    out,
                ),
            };
            emit(&value, out.as_ref(), cli.pretty)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
