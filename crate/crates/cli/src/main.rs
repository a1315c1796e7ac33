//! `ramsey-forge`: command-line workbench for finite structural Ramsey theory.
//!
//! Exit status: 0 on success, 1 on usage or validation errors, 2 when the
//! requested object does not exist, 3 when a budget or depth guard stops
//! the computation.

mod cache;
mod commands;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use commands::*;
use output::{error_document, Format, Status};

/// Costs above this need `--allow-large`.
const LARGE_BUDGET: u128 = 1 << 30;

#[derive(Parser, Debug)]
#[command(name = "ramsey-forge", version, about = "Finite structural Ramsey theory workbench")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Search budget; replaces the command's default.
    #[arg(long, global = true)]
    pub budget: Option<u128>,
    /// Accept a budget above 2^30.
    #[arg(long, global = true)]
    pub allow_large: bool,
    /// Cache directory; overrides RAMSEY_FORGE_CACHE.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Neither read nor write the cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
}

impl GlobalArgs {
    pub fn budget(&self, default: u128) -> u128 {
        self.budget.unwrap_or(default)
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Fraïssé classes: members, isomorphism counts, axiom checks.
    #[command(subcommand)]
    Classes(ClassesCmd),
    /// Free amalgamation under an order prescription.
    #[command(subcommand)]
    Amalgamate(AmalgamateCmd),
    /// Exhaustive arrow checks.
    #[command(subcommand)]
    Ramsey(RamseyCmd),
    /// Generating sequences and their approximation spaces.
    #[command(subcommand)]
    Genseq(GenseqCmd),
    /// Canonization of equivalence relations.
    #[command(subcommand)]
    Canonize(CanonizeCmd),
    /// Ramsey degrees.
    #[command(subcommand)]
    Degrees(DegreesCmd),
}

impl Command {
    fn name(&self) -> String {
        let (group, sub) = match self {
            Command::Classes(c) => ("classes", c.name()),
            Command::Amalgamate(c) => ("amalgamate", c.name()),
            Command::Ramsey(c) => ("ramsey", c.name()),
            Command::Genseq(c) => ("genseq", c.name()),
            Command::Canonize(c) => ("canonize", c.name()),
            Command::Degrees(c) => ("degrees", c.name()),
        };
        format!("{group} {sub}")
    }
}

fn exit_code_for(err: &anyhow::Error) -> (u8, &'static str, serde_json::Value) {
    use ramsey_forge::Error as E;
    match err.downcast_ref::<E>() {
        Some(E::Budget { what, cost, budget }) => (
            3,
            "budget",
            serde_json::json!({ "what": what, "cost": cost.to_string(), "budget": budget.to_string() }),
        ),
        Some(E::Unresolved(_)) => (3, "unresolved", serde_json::Value::Null),
        Some(E::NotFound(_)) => (2, "not-found", serde_json::Value::Null),
        Some(E::Parse { .. }) => (1, "parse", serde_json::Value::Null),
        Some(E::Validation { clause, .. }) => (1, "validation", serde_json::json!({ "clause": clause })),
        Some(E::Domain(_)) => (1, "domain", serde_json::Value::Null),
        None => (1, "usage", serde_json::Value::Null),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let name = cli.command.name();
    let result = match cli.global.budget {
        Some(b) if b > LARGE_BUDGET && !cli.global.allow_large => Err(anyhow::anyhow!(
            "budget {b} exceeds 2^30; pass --allow-large to accept it"
        )),
        Some(0) => Err(anyhow::anyhow!("budget must be positive")),
        _ => run(&cli),
    };
    match result.and_then(|r| Ok((r.status, r.render(cli.global.format)?))) {
        Ok((status, out)) => {
            print!("{out}");
            match status {
                Status::Ok => ExitCode::SUCCESS,
                Status::NotFound => ExitCode::from(2),
            }
        }
        Err(err) => {
            let (code, kind, detail) = exit_code_for(&err);
            eprintln!("error: {err:#}");
            if cli.global.format == Format::Json {
                print!("{}", error_document(&name, kind, &format!("{err:#}"), detail));
            }
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<output::Report> {
    let g = &cli.global;
    match &cli.command {
        Command::Classes(c) => run_classes(c, g),
        Command::Amalgamate(c) => run_amalgamate(c, g),
        Command::Ramsey(c) => run_ramsey(c, g),
        Command::Genseq(c) => run_genseq(c, g),
        Command::Canonize(c) => run_canonize(c, g),
        Command::Degrees(c) => run_degrees(c, g),
    }
}
