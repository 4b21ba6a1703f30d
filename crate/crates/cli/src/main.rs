mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use crate::config::{CliConfig, Overrides};
use crate::error::Failure;

/// Point-to-point shortest paths by recursive spherical partitioning.
#[derive(Debug, Parser)]
#[command(name = "sphere", version, arg_required_else_help = true)]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    /// Print nothing on success.
    #[arg(short, long, global = true, conflicts_with = "json")]
    quiet: bool,
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Route one s-t pair with SPHERE.
    Route {
        /// Source node (1-based).
        #[arg(long)]
        s: u64,
        /// Target node (1-based).
        #[arg(long)]
        t: u64,
        /// Write the node sequence (1-based) to this file.
        #[arg(long, value_name = "FILE")]
        emit_path: Option<PathBuf>,
    },
    /// Print the leaf tasks of one s-t pair as JSON lines.
    Partition {
        #[arg(long)]
        s: u64,
        #[arg(long)]
        t: u64,
    },
    /// Route one s-t pair with a reference or baseline method.
    Baseline {
        #[arg(long, value_enum)]
        method: BaselineMethod,
        #[arg(long)]
        s: u64,
        #[arg(long)]
        t: u64,
        #[arg(long, value_name = "FILE")]
        emit_path: Option<PathBuf>,
    },
    /// Run the seeded benchmark and write records, summary and profiles CSVs.
    Bench,
    /// Recompute the profiles CSV from a summary CSV.
    Profiles {
        /// Summary CSV; defaults to `<output-dir>/summary.csv`.
        #[arg(long = "in", value_name = "FILE")]
        input: Option<PathBuf>,
        /// Profiles CSV; defaults to `<output-dir>/profiles.csv`.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Write a synthetic DIMACS graph.
    Generate {
        #[arg(long, value_enum)]
        kind: GraphKind,
        /// Node count for `path` and `rgg`.
        #[arg(long, default_value_t = 1000)]
        nodes: usize,
        #[arg(long, default_value_t = 100)]
        width: usize,
        #[arg(long, default_value_t = 100)]
        height: usize,
        /// Generator seed.
        #[arg(long = "graph-seed", default_value_t = 2024)]
        graph_seed: u64,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaselineMethod {
    Dijkstra,
    Corridor,
    Louvain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphKind {
    Path,
    Grid,
    Rgg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Output {
    Text,
    Json,
    Quiet,
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    let cfg = CliConfig::resolve(&cli.overrides)?;
    let out = match (cli.quiet, cli.json) {
        (true, _) => Output::Quiet,
        (_, true) => Output::Json,
        _ => Output::Text,
    };
    match cli.command {
        Command::Route { s, t, emit_path } => {
            commands::route(&cfg, out, s, t, emit_path.as_deref())
        }
        Command::Partition { s, t } => commands::partition(&cfg, s, t),
        Command::Baseline {
            method,
            s,
            t,
            emit_path,
        } => commands::baseline(&cfg, out, method, s, t, emit_path.as_deref()),
        Command::Bench => commands::bench(&cfg, out),
        Command::Profiles { input, out: dest } => commands::profiles(&cfg, out, input, dest),
        Command::Generate {
            kind,
            nodes,
            width,
            height,
            graph_seed,
            out: dest,
        } => commands::generate(out, kind, nodes, width, height, graph_seed, &dest),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
