//! The `adele-trace` command line.
//!
//! Exit codes: `0` pass, `1` verification failure, `2` input error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use adele_trace_core::spectral::char_decompose;
use adele_trace_core::verify::{poisson_check_truncated, verify_trace_formula_truncated};
use adele_trace_core::{LocalSb, Prime, Truncation};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::format::{self, local_sb_doc, parse_local_sb, to_json, FormatError, LocalSbDoc, SbAtomDoc};
use crate::random::{random_hecke, random_poisson, RandomBox};
use crate::report::{CharsReportDoc, Metadata, PoissonReportDoc, TraceReportDoc};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "adele-trace", version, about = "Certified trace formula and Poisson checks over Q")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Hecke,
    Poisson,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare the spectral and geometric sides for a Hecke element.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        tol: f64,
        /// Write the report here instead of standard output.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Also list the trace of every Dirichlet character mod N.
        #[arg(long)]
        modulus: Option<u64>,
        /// Seed to record in the report metadata.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check adelic Poisson summation for a factorizable function.
    Poisson {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        tol: f64,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Decompose the trace on L²(K) into Dirichlet characters mod N.
    Chars {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        modulus: u64,
    },
    /// Print the Fourier transform of a local function at p.
    Fourier {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        input: PathBuf,
    },
    /// Generate a seeded random test function.
    Random {
        #[arg(long)]
        seed: u64,
        /// Comma separated primes, e.g. 2,3,5.
        #[arg(long, value_delimiter = ',', default_value = "2,3,5")]
        primes: Vec<u64>,
        #[arg(long, default_value_t = 3)]
        atoms: usize,
        #[arg(long, default_value_t = 2)]
        max_level: u32,
        #[arg(long, value_enum, default_value_t = Kind::Hecke)]
        kind: Kind,
        /// Keep unit factors of conductor dividing N.
        #[arg(long)]
        unit_modulus: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Format { path: PathBuf, source: FormatError },
    #[error("{0}")]
    Core(#[from] adele_trace_core::Error),
    #[error("{0}")]
    Usage(String),
}

/// Parse arguments, run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn emit(text: &str, dest: Option<&Path>) -> Result<(), CliError> {
    match dest {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parsed<T>(path: &Path, r: Result<T, FormatError>) -> Result<T, CliError> {
    r.map_err(|source| CliError::Format { path: path.to_path_buf(), source })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FourierInput {
    Tagged(LocalSbDoc),
    Atoms(Vec<SbAtomDoc>),
}

fn local_from_text(p: u64, text: &str) -> Result<LocalSb, FormatError> {
    let doc = match format::from_json::<FourierInput>(text)? {
        FourierInput::Tagged(doc) if doc.p != p => {
            return Err(FormatError::Invalid {
                path: "$.p".into(),
                message: format!("document is at p = {} but --p {p} was given", doc.p),
            })
        }
        FourierInput::Tagged(doc) => doc,
        FourierInput::Atoms(atoms) => LocalSbDoc { p, atoms },
    };
    parse_local_sb(&doc, "$")
}

fn verdict_code(pass: bool) -> i32 {
    if pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn execute(cmd: &Command) -> Result<i32, CliError> {
    match cmd {
        Command::Verify { input, tol, report, modulus, seed } => {
            let text = read(input)?;
            let h = parsed(input, format::hecke_from_json(&text))?;
            let trunc = Truncation::new(*tol)?;
            let mut check = verify_trace_formula_truncated(&h, &trunc)?;
            if let Some(n) = modulus {
                check.spectral.characters = char_decompose(&h, *n)?.traces;
            }
            let doc = TraceReportDoc::new(&check, Metadata::new(text.as_bytes(), *seed, &trunc));
            emit(&to_json(&doc), report.as_deref())?;
            if !check.verdict.passed() {
                eprintln!("verification failed: residual {:e} exceeds bound {:e} + tol {:e}", check.residual, check.certified_bound, check.tol);
            }
            Ok(verdict_code(check.verdict.passed()))
        }
        Command::Poisson { input, tol, report, seed } => {
            let text = read(input)?;
            let phi = parsed(input, format::poisson_from_json(&text))?;
            let trunc = Truncation::new(*tol)?;
            let r = poisson_check_truncated(&phi, &trunc)?;
            emit(&to_json(&PoissonReportDoc::new(&r, Metadata::new(text.as_bytes(), *seed, &trunc))), report.as_deref())?;
            if !r.verdict.passed() {
                eprintln!("poisson check failed: residual {:e} exceeds bound {:e} + tol {:e}", r.residual, r.bound, r.tol);
            }
            Ok(verdict_code(r.verdict.passed()))
        }
        Command::Chars { input, modulus } => {
            let text = read(input)?;
            let h = parsed(input, format::hecke_from_json(&text))?;
            let d = char_decompose(&h, *modulus)?;
            emit(&to_json(&CharsReportDoc::new(&d, text.as_bytes())), None)?;
            if !d.exact_checksum {
                eprintln!("character sum does not reproduce the finite-place trace");
            }
            Ok(verdict_code(d.exact_checksum))
        }
        Command::Fourier { p, input } => {
            Prime::new(*p)?;
            let text = read(input)?;
            let f = parsed(input, local_from_text(*p, &text))?;
            emit(&to_json(&local_sb_doc(&f.fourier()?)), None)?;
            Ok(EXIT_PASS)
        }
        Command::Random { seed, primes, atoms, max_level, kind, unit_modulus, output } => {
            if *max_level > 6 {
                return Err(CliError::Usage(format!("--max-level {max_level} is above the supported maximum 6")));
            }
            let bx = RandomBox {
                primes: primes.iter().map(|&p| Prime::new(p)).collect::<Result<_, _>>()?,
                atoms: *atoms,
                max_level: *max_level,
                unit_modulus: *unit_modulus,
            };
            let text = match kind {
                Kind::Hecke => format::hecke_to_json(&random_hecke(*seed, &bx)?),
                Kind::Poisson => format::poisson_to_json(&random_poisson(*seed, &bx)?),
            };
            emit(&text, output.as_deref())?;
            Ok(EXIT_PASS)
        }
    }
}
