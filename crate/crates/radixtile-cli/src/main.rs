use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

mod commands;
mod wire;

#[derive(Debug)]
pub enum CliError {
    Lib(radixtile::Error),
    Input(String),
}

impl From<radixtile::Error> for CliError {
    fn from(e: radixtile::Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_budget() => 3,
            _ => 2,
        }
    }

    fn to_json(&self) -> Value {
        let (kind, message) = match self {
            CliError::Lib(e) => (format!("{e:?}").split(['(', ' ', '{']).next().unwrap_or("Error").to_string(), e.to_string()),
            CliError::Input(m) => ("InvalidInput".to_string(), m.clone()),
        };
        json!({ "error": { "kind": kind, "message": message, "exit_code": self.exit_code() } })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Pgm,
    Ppm,
    Csv,
}

/// Exact computations with matrix number systems and digit tiles.
#[derive(Debug, Parser)]
#[command(name = "radixtile", version)]
pub struct Cli {
    /// System descriptor: {"matrix": [...], "digits": [...]} or {"polynomial": {"coeffs": [...], "digits": [...]}}.
    #[arg(long, short, global = true)]
    system: Option<PathBuf>,
    /// JSON payload for the subcommand.
    #[arg(long, short, global = true)]
    payload: Option<PathBuf>,
    /// Output format; each subcommand supports a subset.
    #[arg(long, short, global = true, value_enum)]
    format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Add a generation timestamp to JSON output.
    #[arg(long, global = true)]
    timestamp: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DimsKind {
    Box,
    Hausdorff,
    Similarity,
    Bm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MultinvAction {
    Check,
    Cloud,
    Converge,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Canonical residues of Z^n / A Z^n.
    Residues,
    /// Decide whether every integer vector has a finite expansion.
    NumsysCheck,
    /// Finite expansion of {"vector": v}, least significant digit first.
    Expand,
    /// Exact value of {"x": ep-sequence}.
    Eval,
    /// Compare {"x", "y"} exactly and through the neighbour graph.
    Equiv,
    /// All representations equivalent to {"x"} (samples when infinite).
    EnumerateEquiv,
    /// Whether every point of the tile has a unique representation.
    Unique,
    /// Integer neighbours of the tile.
    Neighbours {
        #[arg(long)]
        dot: bool,
    },
    /// Triple-state graph; a {"p","q","r","steps"} payload also walks it.
    TripleGraph {
        #[arg(long)]
        dot: bool,
    },
    /// SEP test of {"sequence": sets} or {"integers": ints}.
    Sep,
    /// Intersection T ∩ (T + α) for {"alpha"}, or several translates.
    Intersect {
        #[arg(long)]
        multi: bool,
    },
    /// Dimensions of an intersection or a carpet.
    Dims {
        #[arg(value_enum)]
        kind: DimsKind,
    },
    /// Translation whose intersection has box dimension λ·dim T.
    Levelset {
        #[arg(long)]
        lambda: String,
    },
    /// Components of T ∩ (T + α) over the representations of α.
    UnionComponents,
    /// Multiplicative invariance of a digit automaton.
    Multinv {
        #[arg(value_enum)]
        action: MultinvAction,
    },
    /// Rasterize a k-tile, an intersection, or an overlap with a translate.
    Render {
        /// Translation vector, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        overlap: Option<String>,
    },
}

pub enum Output {
    Json(Value),
    Text(String),
    Bytes(Vec<u8>),
}

fn emit(cli: &Cli, out: Output, to_stdout: bool) -> std::io::Result<()> {
    let bytes = match out {
        Output::Json(mut v) => {
            if cli.timestamp {
                let secs = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
                if let Value::Object(m) = &mut v {
                    m.insert("timestamp".into(), json!(secs));
                }
            }
            let mut s = serde_json::to_string_pretty(&v).expect("serializable");
            s.push('\n');
            s.into_bytes()
        }
        Output::Text(s) => s.into_bytes(),
        Output::Bytes(b) => b,
    };
    match &cli.output {
        Some(p) if !to_stdout => std::fs::write(p, bytes),
        _ => std::io::stdout().write_all(&bytes),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = commands::run(&cli);
    let (out, code) = match result {
        Ok(o) => (o, 0),
        Err(e) => (Output::Json(e.to_json()), e.exit_code()),
    };
    if let Err(e) = emit(&cli, out, code != 0) {
        eprintln!("radixtile: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
