//! `hermite-mc`: experiment runner for Monte Carlo integration in Hermite
//! spaces.
//!
//! Every invocation reads one JSON configuration (from `--config` or
//! standard input) and writes one machine-readable artifact. Outputs are a
//! pure function of the configuration and seed: reruns are byte-identical,
//! and `--threads` changes wall time only.
//!
//! Exit codes: 0 success, 2 configuration error, 3 runtime numeric failure
//! (partial results are flushed), 4 completed with warnings.

mod commands;
mod config;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{CmdError, CommandOutput};
use config::{ExperimentConfig, OutputFormat};

#[derive(Parser)]
#[command(name = "hermite-mc", version, about = "Monte Carlo integration experiments in Hermite spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replicated Monte Carlo error study over a grid of node counts
    ErrorStudy(CommonArgs),
    /// Tractability classification with partial-sum diagnostics
    Tractability(CommonArgs),
    /// Information-complexity table over an (eps, s) grid
    NmcTable(CommonArgs),
    /// Kernel values at configured point pairs
    KernelEval(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the JSON configuration; "-" or omitted reads standard input
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path; overrides the config, defaults to standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; overrides the config
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Master seed; overrides the config
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 picks automatically. Affects wall time only.
    #[arg(long, env = "HERMITE_MC_THREADS", default_value_t = 0)]
    threads: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, default_format) = match &cli.command {
        Command::ErrorStudy(a) => (a, OutputFormat::Csv),
        Command::Tractability(a) => (a, OutputFormat::Json),
        Command::NmcTable(a) => (a, OutputFormat::Csv),
        Command::KernelEval(a) => (a, OutputFormat::Csv),
    };

    let cfg = match load_config(args.config.as_deref()) {
        Ok(cfg) => cfg,
        Err(message) => {
            eprintln!("config error: {message}");
            return ExitCode::from(2);
        }
    };
    let format = args.format.or(cfg.format).unwrap_or(default_format);
    let out_path = args.out.clone().or_else(|| cfg.out.clone());

    let pool = match rayon::ThreadPoolBuilder::new().num_threads(args.threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("config error: cannot build thread pool: {e}");
            return ExitCode::from(2);
        }
    };

    let result = pool.install(|| match &cli.command {
        Command::ErrorStudy(a) => commands::error_study(&cfg, a.seed, format),
        Command::Tractability(_) => commands::tractability_cmd(&cfg, format),
        Command::NmcTable(_) => commands::nmc_table(&cfg, format),
        Command::KernelEval(_) => commands::kernel_eval_cmd(&cfg, format),
    });

    match result {
        Ok(CommandOutput { text, warnings }) => {
            if let Err(e) = write_output(out_path.as_deref(), &text) {
                eprintln!("runtime error: cannot write output: {e}");
                return ExitCode::from(3);
            }
            if warnings {
                eprintln!("completed with warnings: some rows are flagged");
                ExitCode::from(4)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(CmdError::Config(e)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(CmdError::Runtime { message, partial }) => {
            if let Some(text) = partial {
                let _ = write_output(out_path.as_deref(), &text);
            }
            eprintln!("runtime error: {message}");
            ExitCode::from(3)
        }
    }
}

fn load_config(path: Option<&std::path::Path>) -> Result<ExperimentConfig, String> {
    let text = match path {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?
        }
        _ => {
            let mut buffer = String::new();
            std::io::stdin()
                .read_to_string(&mut buffer)
                .map_err(|e| format!("cannot read standard input: {e}"))?;
            buffer
        }
    };
    ExperimentConfig::from_json(&text).map_err(|e| e.0)
}

fn write_output(path: Option<&std::path::Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    }
}
