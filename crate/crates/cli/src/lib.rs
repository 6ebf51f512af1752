//! The `filtermin` command line: minimize, generate, check and export
//! filters, and run benchmark suites.

pub mod bench;
mod commands;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use filtermin_core::minimizer::Method;

use bench::Suite;

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    /// A check failed or the input cannot be minimized.
    Failure = 1,
    /// Bad arguments or unreadable input.
    Usage = 2,
    /// The time budget ran out before anything better than the input was
    /// found.
    Timeout = 3,
}

#[derive(Debug, Parser)]
#[command(name = "filtermin", version, about = "Minimize deterministic combinatorial filters")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Minimize a deterministic filter.
    Minimize(MinimizeArgs),
    /// Generate a random deterministic filter.
    Gen(GenArgs),
    /// Check determinism or output simulation.
    Check(CheckArgs),
    /// Write the cover constraints as DIMACS CNF or as an LP file.
    Export(ExportArgs),
    /// Run a benchmark suite over generated filters.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct MinimizeArgs {
    input: PathBuf,
    #[arg(long, default_value = "sat", value_parser = parse_method)]
    method: Method,
    #[arg(long, default_value_t = 60_000)]
    timeout_ms: u64,
    /// Solver seed [default: $FILTERMIN_SEED or 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Where to write the minimized filter.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to write per-bound statistics as CSV.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Layers below the root.
    #[arg(long)]
    layers: usize,
    /// States per layer.
    #[arg(long)]
    width: usize,
    #[arg(long, default_value_t = 0)]
    self_loops: usize,
    #[arg(long, default_value_t = 0)]
    back_edges: usize,
    /// Size of the color alphabet.
    #[arg(long)]
    outputs: usize,
    #[arg(long, default_value_t = 1)]
    outputs_per_state: usize,
    /// Size of the observation alphabet.
    #[arg(long)]
    observations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct CheckArgs {
    /// Check that a filter is deterministic.
    #[arg(long, value_name = "FILTER")]
    deterministic: Option<PathBuf>,
    /// Check that CANDIDATE output simulates REFERENCE.
    #[arg(long, num_args = 2, value_names = ["CANDIDATE", "REFERENCE"])]
    simulates: Option<Vec<PathBuf>>,
}

#[derive(Debug, Args)]
struct ExportArgs {
    input: PathBuf,
    /// Bound on the number of subsets [default: number of states]
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    dimacs: Option<PathBuf>,
    /// Variable map for the DIMACS file.
    #[arg(long)]
    varmap: Option<PathBuf>,
    /// Emit the lazy clause set (every state covered, no zip clauses).
    #[arg(long)]
    lazy: bool,
    #[arg(long)]
    lp: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    /// Instances per configuration [default: 10, or 3 for the large suite]
    #[arg(long)]
    repeats: Option<usize>,
    /// Values of the swept parameter, comma separated.
    #[arg(long, value_delimiter = ',')]
    sweep: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', value_parser = parse_method)]
    methods: Option<Vec<Method>>,
    /// Per-instance budget.
    #[arg(long, default_value_t = 60_000)]
    timeout_ms: u64,
    /// Output path; stdout when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Master seed for instance generation.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write 0 in the elapsed column.
    #[arg(long)]
    no_timing: bool,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Minimize(a) => commands::minimize(a),
        Command::Gen(a) => commands::gen(a),
        Command::Check(a) => commands::check(a),
        Command::Export(a) => commands::export(a),
        Command::Bench(a) => commands::bench(a),
    };
    match result {
        Ok(exit) => exit as i32,
        Err(e) => {
            eprintln!("error: {e:#}");
            commands::classify(&e) as i32
        }
    }
}
