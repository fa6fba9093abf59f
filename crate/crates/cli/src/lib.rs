//! Command-line front end for `padic-tiles`: JSON problem in, JSON report out.
//!
//! Exit status: 0 pass, 1 verified negative, 2 input error, 3 could not verify.

pub mod census;
pub mod report;
mod verbs;

use std::io::Read;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub use census::{census, Census, CensusMismatch, CensusRow};
pub use report::{Check, Options, Report, Status, SCHEMA};

pub const DEFAULT_SEED: u64 = 20240601;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verb {
    AnalyzeTree,
    CheckTile,
    FindComplements,
    FindSpectra,
    ClassifyFinite,
    ClassifyQpz2,
    FugledeCensus,
    UniformPartition,
    Density,
    ZeroScan,
    Spectrum,
    LambdaIii,
}

impl Verb {
    fn takes_truncation(self) -> bool {
        matches!(self, Verb::ZeroScan | Verb::Spectrum | Verb::LambdaIii)
    }

    fn takes_budget(self) -> bool {
        matches!(self, Verb::FindComplements | Verb::FindSpectra | Verb::FugledeCensus)
    }
}

#[derive(Clone, Debug, Parser)]
#[command(name = "padic-tiles", version, about = "Exact tiling and spectral-set checks over Q_p and small finite groups")]
pub struct Cli {
    #[arg(value_enum)]
    pub verb: Verb,
    /// Path to a JSON file, `-` for stdin, or the JSON text itself.
    #[arg(long, value_name = "PATH|JSON")]
    pub input: String,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Truncation exponent (spectrum, lambda-iii) or largest scanned sphere (zero-scan).
    #[arg(long, value_name = "M", allow_negative_numbers = true)]
    pub truncation: Option<i64>,
    /// Node budget for searches, subset budget for the census.
    #[arg(long, value_name = "N")]
    pub budget: Option<u64>,
    #[arg(long, value_name = "S", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Write the level tree as Graphviz DOT (analyze-tree).
    #[arg(long, value_name = "PATH")]
    pub dot: Option<PathBuf>,
    /// JSON report (the only format).
    #[arg(long)]
    pub json: bool,
}

impl Cli {
    /// A command with default options.
    pub fn new(verb: Verb, input: impl Into<String>) -> Self {
        Cli {
            verb,
            input: input.into(),
            output: None,
            truncation: None,
            budget: None,
            seed: DEFAULT_SEED,
            dot: None,
            json: true,
        }
    }

    fn validate(&self) -> Result<(), String> {
        if self.truncation.is_some() && !self.verb.takes_truncation() {
            return Err("--truncation applies to zero-scan, spectrum and lambda-iii only".into());
        }
        if self.budget.is_some() && !self.verb.takes_budget() {
            return Err("--budget applies to find-complements, find-spectra and fuglede-census only".into());
        }
        if self.dot.is_some() && self.verb != Verb::AnalyzeTree {
            return Err("--dot applies to analyze-tree only".into());
        }
        Ok(())
    }
}

fn read_input(input: &str) -> Result<String, String> {
    let trimmed = input.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(input.to_string());
    }
    if input == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| format!("stdin: {e}"))?;
        return Ok(s);
    }
    std::fs::read_to_string(input).map_err(|e| format!("{input}: {e}"))
}

pub fn digest(text: &str) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(text.as_bytes())))
}

/// Runs one command without touching the filesystem beyond reading the input.
pub fn run(cli: &Cli) -> Report {
    let start = Instant::now();
    let mut report = Report {
        schema: SCHEMA,
        verb: cli.verb,
        input_digest: None,
        options: Options { truncation: cli.truncation, budget: cli.budget, seed: cli.seed },
        status: Status::InputError,
        result: serde_json::Value::Null,
        verification: Vec::new(),
        error: None,
        timing_ms: 0,
        dot: None,
    };
    let outcome = cli.validate().and_then(|()| read_input(&cli.input));
    match outcome {
        Err(e) => report.error = Some(e),
        Ok(text) => {
            report.input_digest = Some(digest(&text));
            let ctx = verbs::Ctx { truncation: cli.truncation, budget: cli.budget };
            match verbs::dispatch(cli.verb, &text, &ctx) {
                Ok(o) => {
                    report.status =
                        if o.checks.iter().all(|c| c.passed) { o.status } else { Status::Unverified };
                    report.result = o.result;
                    report.verification = o.checks;
                    report.dot = o.dot;
                }
                Err(f) => {
                    report.status = f.status;
                    report.error = Some(f.message);
                }
            }
        }
    }
    report.timing_ms = start.elapsed().as_millis() as u64;
    report
}

/// Runs, writes the report and the DOT file, and returns the exit status.
pub fn execute(cli: &Cli) -> i32 {
    let report = run(cli);
    let json = report.to_json();
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &json).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{json}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return Status::InputError.exit_code();
    }
    if let (Some(path), Some(dot)) = (&cli.dot, &report.dot) {
        if let Err(e) = std::fs::write(path, dot) {
            eprintln!("error: {}: {e}", path.display());
            return Status::InputError.exit_code();
        }
    }
    if let Some(e) = &report.error {
        eprintln!("error: {e}");
    }
    report.exit_code()
}
