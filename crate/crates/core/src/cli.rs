//! The `scp` command line.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 parse or validation error,
//! 3 contradiction, 4 enumeration cap exceeded.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::assignment::Assignment;
use crate::instance::{parse_scp, ParseError, ScpInstance, SetId};
use crate::oracle::{enumerate_completions, OracleError};
use crate::qimm::{
    build_matrix, describe_set, enumerate_variants, MatrixError, TernaryMatrix,
    DEFAULT_ENUMERATION_CAP,
};
use crate::quantum::{lift, render_expression, render_family, set_expression};
use crate::sampler::{prepare, sample_rounds, sample_until, SampleError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_CONTRADICTION: i32 = 3;
pub const EXIT_LIMIT: i32 = 4;

/// Rounds run by `sample` when no target is given.
pub const DEFAULT_SAMPLE_ROUNDS: u64 = 1000;

#[derive(Debug, Parser)]
#[command(
    name = "scp",
    version,
    about = "Ternary membership matrices, qubit lifting and measurement sampling for set constraint problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the ternary membership matrix and describe every set
    Solve(Common),
    /// Lift the matrix to qubit states and write each set as a ket expression
    Quantum(Common),
    /// Measure the full register repeatedly
    Sample(SampleArgs),
    /// List the determinate variants of one set, or all joint completions
    Enumerate(EnumerateArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Constraint file
    file: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy)]
enum Seed {
    Fixed(u64),
    Random,
}

fn parse_seed(s: &str) -> Result<Seed, String> {
    if s == "random" {
        Ok(Seed::Random)
    } else {
        s.parse()
            .map(Seed::Fixed)
            .map_err(|_| format!("expected an unsigned integer or `random`, got `{s}`"))
    }
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[command(flatten)]
    common: Common,
    /// Number of rounds to run without a target [default: 1000]
    #[arg(long)]
    rounds: Option<u64>,
    /// Seed for the measurement streams, or `random`
    #[arg(long, default_value = "0", value_parser = parse_seed)]
    seed: Seed,
    /// JSON assignment to sample until, or `none`
    #[arg(long)]
    target: Option<String>,
    /// Round budget when a target is given [default: 2^(u+4), at most 2^30]
    #[arg(long)]
    max_rounds: Option<u64>,
}

#[derive(Debug, Args)]
struct EnumerateArgs {
    #[command(flatten)]
    common: Common,
    /// Set whose variants to list, or `all` for joint completions
    #[arg(long, default_value = "all")]
    set: String,
    /// Maximum number of uncertain cells to enumerate over
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: u32,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(PathBuf, std::io::Error),
    Parse(PathBuf, ParseError),
    Matrix(MatrixError),
    Oracle(OracleError),
    Sample(SampleError),
    Target(PathBuf, String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(..) => EXIT_USAGE,
            CliError::Parse(..) | CliError::Sample(_) | CliError::Target(..) => EXIT_PARSE,
            CliError::Matrix(MatrixError::Invalid(_)) => EXIT_PARSE,
            CliError::Matrix(MatrixError::Contradiction { .. }) => EXIT_CONTRADICTION,
            CliError::Matrix(MatrixError::UnknownSet(_)) => EXIT_USAGE,
            CliError::Matrix(MatrixError::CapExceeded { .. }) => EXIT_LIMIT,
            CliError::Oracle(OracleError::CapExceeded { .. }) => EXIT_LIMIT,
            CliError::Oracle(_) => EXIT_PARSE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Io(path, e) => write!(f, "{}: {e}", path.display()),
            CliError::Parse(path, e) => write!(f, "{}:{e}", path.display()),
            CliError::Matrix(e) => write!(f, "{e}"),
            CliError::Oracle(e) => write!(f, "{e}"),
            CliError::Sample(e) => write!(f, "{e}"),
            CliError::Target(path, e) => write!(f, "{}: invalid target: {e}", path.display()),
        }
    }
}

impl From<MatrixError> for CliError {
    fn from(e: MatrixError) -> Self {
        CliError::Matrix(e)
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        CliError::Oracle(e)
    }
}

impl From<SampleError> for CliError {
    fn from(e: SampleError) -> Self {
        CliError::Sample(e)
    }
}

/// Runs the CLI with `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve(args) => solve(&args),
        Command::Quantum(args) => quantum(&args),
        Command::Sample(args) => sample(&args),
        Command::Enumerate(args) => enumerate(&args),
    };
    match result {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn load(path: &Path) -> Result<(ScpInstance, TernaryMatrix), CliError> {
    let source = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_owned(), e))?;
    let instance = parse_scp(&source).map_err(|e| CliError::Parse(path.to_owned(), e))?;
    let matrix = build_matrix(&instance)?;
    Ok((instance, matrix))
}

fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json value");
    s.push('\n');
    s
}

fn solve(args: &Common) -> Result<String, CliError> {
    let (_, matrix) = load(&args.file)?;
    let descriptions = matrix
        .sets()
        .iter()
        .map(|s| describe_set(&matrix, s))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(match args.format {
        OutputFormat::Text => {
            let mut out = matrix.to_table();
            out.push('\n');
            for d in &descriptions {
                out.push_str(&format!("{d}\n"));
            }
            out
        }
        OutputFormat::Json => {
            let mut doc = matrix.to_json();
            doc["descriptions"] = serde_json::to_value(&descriptions).expect("descriptions");
            pretty(&doc)
        }
    })
}

fn quantum(args: &Common) -> Result<String, CliError> {
    let (_, matrix) = load(&args.file)?;
    let q = lift(&matrix);
    let exprs = q
        .sets()
        .iter()
        .map(|s| set_expression(&q, s))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(match args.format {
        OutputFormat::Text => {
            let mut out = q.to_table();
            out.push('\n');
            out.push_str(&render_family("U", q.elements()));
            out.push('\n');
            out.push_str(&render_family("S", q.sets()));
            out.push('\n');
            for e in &exprs {
                out.push_str(&render_expression(e));
                out.push('\n');
            }
            out
        }
        OutputFormat::Json => {
            let mut doc = q.to_json();
            doc["expressions"] = exprs
                .iter()
                .map(|e| {
                    json!({
                        "set": e.set,
                        "in": e.in_group,
                        "out": e.out_group,
                        "superposed": e.superposed_group,
                        "text": render_expression(e),
                    })
                })
                .collect();
            pretty(&doc)
        }
    })
}

fn sample(args: &SampleArgs) -> Result<String, CliError> {
    let target_path = args
        .target
        .as_deref()
        .filter(|t| *t != "none")
        .map(PathBuf::from);
    if target_path.is_some() && args.rounds.is_some() {
        return Err(CliError::Usage(
            "--rounds applies only without --target; use --max-rounds to bound a targeted run"
                .into(),
        ));
    }
    if target_path.is_none() && args.max_rounds.is_some() {
        return Err(CliError::Usage("--max-rounds requires --target".into()));
    }
    let (_, matrix) = load(&args.common.file)?;
    let register = prepare(&lift(&matrix));
    let seed = match args.seed {
        Seed::Fixed(s) => s,
        Seed::Random => rand::random(),
    };

    let report = match &target_path {
        None => sample_rounds(
            &register,
            seed,
            args.rounds.unwrap_or(DEFAULT_SAMPLE_ROUNDS),
        ),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.clone(), e))?;
            let target = Assignment::from_json(&text)
                .map_err(|e| CliError::Target(path.clone(), e.to_string()))?;
            let budget = args
                .max_rounds
                .unwrap_or_else(|| register.default_max_rounds());
            sample_until(&register, &target, seed, budget)?
        }
    };

    Ok(match args.common.format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&report).expect("report");
            s.push('\n');
            s
        }
        OutputFormat::Text => {
            let mut out = format!("seed: {}\nrounds: {}\n", report.seed, report.rounds);
            match &report.target {
                None => out.push_str("target: none\n"),
                Some(_) if report.hit => {
                    out.push_str(&format!("target: hit in round {}\n", report.rounds))
                }
                Some(_) => out.push_str("target: not hit\n"),
            }
            out.push_str(&format!(
                "preparations: {}\nmeasurements: {}\n",
                report.preparations, report.measurements
            ));
            if !report.per_cell_frequency.is_empty() {
                out.push_str("member frequency per uncertain cell:\n");
                for c in &report.per_cell_frequency {
                    out.push_str(&format!(
                        "  ({}, {})  {:.4}\n",
                        c.element, c.set, c.frequency
                    ));
                }
            }
            out
        }
    })
}

fn enumerate(args: &EnumerateArgs) -> Result<String, CliError> {
    let (_, matrix) = load(&args.common.file)?;
    if args.set != "all" {
        let set = SetId::new(args.set.clone());
        let d = describe_set(&matrix, &set)?;
        let variants = enumerate_variants(&matrix, &set, args.cap)?;
        return Ok(match args.common.format {
            OutputFormat::Json => pretty(&json!({
                "set": set,
                "uncertain": d.uncertain,
                "variants": variants
                    .iter()
                    .map(|v| json!({"name": v.name(), "index": v.index, "members": v.members}))
                    .collect::<Vec<_>>(),
            })),
            OutputFormat::Text => {
                let names = |xs: &[crate::instance::ElementId]| {
                    xs.iter().map(|e| e.as_str()).collect::<Vec<_>>().join(", ")
                };
                let mut out = format!(
                    "{set}: {} uncertain ({}), {} variants\n",
                    d.uncertain.len(),
                    names(&d.uncertain),
                    variants.len()
                );
                for v in &variants {
                    out.push_str(&format!("{} = {{{}}}\n", v.name(), names(&v.members)));
                }
                out
            }
        });
    }

    let completions = enumerate_completions(&matrix, args.cap)?;
    let cells = matrix.uncertain_cells();
    Ok(match args.common.format {
        OutputFormat::Json => pretty(&json!({
            "elements": matrix.elements(),
            "sets": matrix.sets(),
            "uncertain_cells": cells,
            "completions": completions.completions(),
        })),
        OutputFormat::Text => {
            let listed = cells
                .iter()
                .map(|(e, s)| format!("({e}, {s})"))
                .collect::<Vec<_>>()
                .join(" ");
            let mut out = format!(
                "{} uncertain cells: {listed}\n{} completions (one row group per element, 0 = member, 1 = non-member)\n",
                cells.len(),
                completions.len()
            );
            let width = completions.len().saturating_sub(1).to_string().len();
            for (i, c) in completions.completions().iter().enumerate() {
                out.push_str(&format!("{i:>width$}: {c}\n"));
            }
            out
        }
    })
}
