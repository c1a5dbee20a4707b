//! hillcalc: run filtration, Hill lattice, and chain complex computations on
//! JSON instance files and emit machine-readable certificate reports.

mod commands;
mod instance;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{execute, Options, Request};

/// A parse failure is exit code 2, a failed verification check exit code 1.
pub enum CliError {
    Malformed(String),
    Check(String),
}

#[derive(Parser)]
#[command(name = "hillcalc", version, about = "Exact filtration and chain complex calculator")]
struct Cli {
    /// Exhaustive closed-set verification up to this many witnesses
    #[arg(long, default_value_t = 12, global = true)]
    exhaustive_bound: usize,

    /// Abort iterative constructions after this many rounds
    #[arg(long, default_value_t = 1000, global = true)]
    iteration_cap: usize,

    /// Seed for sampled verification
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,

    /// Include timing_ms in reports (off by default: reports stay byte-stable)
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the chain and witness axioms of a filtration instance
    Validate { file: PathBuf },
    /// Invariant factors of every step quotient
    Factors { file: PathBuf },
    /// Splice the instance's 'parts' filtrations into the chain
    Refine { file: PathBuf },
    /// Enumerate or sample the closed-set lattice and verify its laws
    VerifyHill { file: PathBuf },
    /// Is the given index set closed?
    Closed {
        file: PathBuf,
        #[arg(long)]
        set: String,
    },
    /// Sum of witnesses over an index set
    Ell {
        file: PathBuf,
        #[arg(long)]
        set: String,
    },
    /// Closed superset of an index set (--set) or of a subobject (--gens)
    Hull {
        file: PathBuf,
        #[arg(long)]
        set: Option<String>,
        #[arg(long)]
        gens: Option<String>,
    },
    /// Induced filtration of ell(t)/ell(s) for closed s ⊆ t
    H3 {
        file: PathBuf,
        #[arg(long)]
        s: String,
        #[arg(long)]
        t: String,
    },
    /// Trap a subobject in a clean witness with clean quotient
    Kaplansky {
        file: PathBuf,
        #[arg(long)]
        gens: String,
    },
    /// Level function and the rebounded filtration certificate
    Relength { file: PathBuf },
    /// Transfer the chain onto a direct summand via 'projections'
    Summand { file: PathBuf },
    /// Common refinement across the instance and its 'others'
    Intersect { file: PathBuf },
    /// Mapping cone and its componentwise split exact sequence
    Cone { file: PathBuf },
    /// Decide null-homotopy and emit the homotopy certificate
    Homotopic { file: PathBuf },
    /// Ext^1 of componentwise split extensions of source by target
    Ext1cs { file: PathBuf },
    /// Homology at one degree (--degree) or all degrees
    Homology {
        file: PathBuf,
        #[arg(long)]
        degree: Option<i64>,
    },
    /// Filtration of a complex through component image lattices
    Cpxfilt { file: PathBuf },
    /// Distinguished filtration of an acyclic complex through cycle lattices
    Tildefilt { file: PathBuf },
    /// Run every item of a batch instance, reports in input order
    Batch { file: PathBuf },
}

impl Command {
    fn file(&self) -> &PathBuf {
        match self {
            Command::Validate { file }
            | Command::Factors { file }
            | Command::Refine { file }
            | Command::VerifyHill { file }
            | Command::Closed { file, .. }
            | Command::Ell { file, .. }
            | Command::Hull { file, .. }
            | Command::H3 { file, .. }
            | Command::Kaplansky { file, .. }
            | Command::Relength { file }
            | Command::Summand { file }
            | Command::Intersect { file }
            | Command::Cone { file }
            | Command::Homotopic { file }
            | Command::Ext1cs { file }
            | Command::Homology { file, .. }
            | Command::Cpxfilt { file }
            | Command::Tildefilt { file }
            | Command::Batch { file } => file,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Factors { .. } => "factors",
            Command::Refine { .. } => "refine",
            Command::VerifyHill { .. } => "verify-hill",
            Command::Closed { .. } => "closed",
            Command::Ell { .. } => "ell",
            Command::Hull { .. } => "hull",
            Command::H3 { .. } => "h3",
            Command::Kaplansky { .. } => "kaplansky",
            Command::Relength { .. } => "relength",
            Command::Summand { .. } => "summand",
            Command::Intersect { .. } => "intersect",
            Command::Cone { .. } => "cone",
            Command::Homotopic { .. } => "homotopic",
            Command::Ext1cs { .. } => "ext1cs",
            Command::Homology { .. } => "homology",
            Command::Cpxfilt { .. } => "cpxfilt",
            Command::Tildefilt { .. } => "tildefilt",
            Command::Batch { .. } => "batch",
        }
    }
}

fn parse_gens_flag(text: &str) -> Result<Vec<Vec<String>>, CliError> {
    serde_json::from_str(text)
        .map_err(|e| CliError::Malformed(format!("--gens: expected a JSON generator list: {e}")))
}

fn run(cli: &Cli) -> (serde_json::Value, i32) {
    let path = cli.command.file();
    let label = path.display().to_string();
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            return (
                serde_json::json!({
                    "command": cli.command.name(),
                    "instance": label,
                    "error": format!("cannot read file: {e}"),
                }),
                2,
            )
        }
    };
    let parsed = match instance::parse_instance(&text) {
        Ok(p) => p,
        Err(CliError::Malformed(m)) | Err(CliError::Check(m)) => {
            return (
                serde_json::json!({
                    "command": cli.command.name(),
                    "instance": label,
                    "error": m,
                }),
                2,
            )
        }
    };
    let mut req = Request {
        command: cli.command.name(),
        set: None,
        s: None,
        t: None,
        gens: None,
        degree: None,
    };
    match &cli.command {
        Command::Closed { set, .. } | Command::Ell { set, .. } => req.set = Some(set.clone()),
        Command::Hull { set, gens, .. } => {
            req.set = set.clone();
            if let Some(g) = gens {
                match parse_gens_flag(g) {
                    Ok(rows) => req.gens = Some(rows),
                    Err(CliError::Malformed(m)) | Err(CliError::Check(m)) => {
                        return (
                            serde_json::json!({
                                "command": req.command,
                                "instance": label,
                                "error": m,
                            }),
                            2,
                        )
                    }
                }
            }
        }
        Command::H3 { s, t, .. } => {
            req.s = Some(s.clone());
            req.t = Some(t.clone());
        }
        Command::Kaplansky { gens, .. } => match parse_gens_flag(gens) {
            Ok(rows) => req.gens = Some(rows),
            Err(CliError::Malformed(m)) | Err(CliError::Check(m)) => {
                return (
                    serde_json::json!({
                        "command": req.command,
                        "instance": label,
                        "error": m,
                    }),
                    2,
                )
            }
        },
        Command::Homology { degree, .. } => req.degree = *degree,
        _ => {}
    }
    let opts = Options {
        exhaustive_bound: cli.exhaustive_bound,
        iteration_cap: cli.iteration_cap,
        seed: cli.seed,
        timing: cli.timing,
    };
    execute(&req, &parsed, &opts, &label)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, code) = run(&cli);
    let text = serde_json::to_string_pretty(&report).expect("report serialization");
    // a closed pipe (e.g. piping into head) is not a failure of ours
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(stdout, "{text}");
    let _ = stdout.flush();
    ExitCode::from(code as u8)
}
