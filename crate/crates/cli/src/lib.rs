//! Command-line front end: configuration, expressions and report output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod expr;
pub mod run;
pub mod table;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use error::{CliError, CliResult};
use run::Command;

#[derive(Debug, Parser)]
#[command(name = "korovkin", version, about = "Error bounds and Korovkin convergence checks for positive linear operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Pointwise and uniform error bounds per (n, t) as CSV.
    Bound(RunArgs),
    /// Test-function defects for statements a, b' and c.
    Converge(RunArgs),
    /// Positivity, domination, regularity and constant checks.
    CheckOperator(RunArgs),
    /// All six statements of the equivalence theorem with consistency findings.
    Equivalence(RunArgs),
    /// Aligned plain-text view of a CSV report.
    Table(TableArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Replaces operator.n, e.g. `--n 10,100,1000`.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<u64>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Overrides any config field: `--set domain.grid_resolution=101`.
    #[arg(long = "set", value_name = "PATH=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// CSV file to render.
    #[arg(long, visible_alias = "config")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io { path: p.to_path_buf(), source }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn overrides(args: &RunArgs) -> CliResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    for s in &args.set {
        let (k, v) = s.split_once('=').ok_or_else(|| CliError::Config(format!("--set expects PATH=VALUE, got `{s}`")))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    if let Some(n) = &args.n {
        out.push(("operator.n".into(), serde_json::to_string(n).expect("list of integers")));
    }
    if let Some(seed) = args.seed {
        out.push(("options.seed".into(), seed.to_string()));
    }
    if let Some(t) = args.threshold {
        out.push(("options.threshold".into(), serde_json::to_string(&t).expect("finite float")));
    }
    Ok(out)
}

fn execute(cmd: Command, args: &RunArgs) -> CliResult<u8> {
    let (cfg, base) = config::load(&args.config, &overrides(args)?)?;
    let out = run::run(cmd, &cfg, &base)?;
    let path = args.out.clone().or_else(|| cfg.options.out.as_ref().map(|p| base.join(p)));
    write_output(path.as_deref(), &out.csv)?;
    for m in &out.messages {
        eprintln!("{m}");
    }
    Ok(out.code)
}

/// Runs a parsed command line and returns the process exit code.
pub fn main_with(cli: Cli) -> u8 {
    let result = match &cli.command {
        CliCommand::Bound(a) => execute(Command::Bound, a),
        CliCommand::Converge(a) => execute(Command::Converge, a),
        CliCommand::CheckOperator(a) => execute(Command::CheckOperator, a),
        CliCommand::Equivalence(a) => execute(Command::Equivalence, a),
        CliCommand::Table(a) => std::fs::read_to_string(&a.input)
            .map_err(|source| CliError::Io { path: a.input.clone(), source })
            .and_then(|text| table::render(&text))
            .and_then(|t| write_output(a.out.as_deref(), &t))
            .map(|_| error::EXIT_OK),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
