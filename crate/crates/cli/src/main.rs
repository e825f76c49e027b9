mod config;
mod run;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Ground states of `-Δu + a u = u log u²` on weighted graphs.
#[derive(Debug, Parser)]
#[command(name = "graphlog", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve on one graph; writes solution JSON, trace CSV and summary JSON.
    Solve(SolveArgs),
    /// Solve on a growing sequence of balls of an (infinite) family.
    Exhaustion(ExhaustionArgs),
    /// Check the series behind the counterexamples, or estimate C_eps.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Render a graph, optionally with a solution, as DOT.
    ExportDot(ExportDotArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Run document (JSON); flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Family spec such as `path:30`, or a graph JSON path.
    #[arg(long)]
    graph: Option<String>,
    /// Potential spec such as `constant:-0.5`.
    #[arg(long)]
    potential: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// `bump:vertex,height[,width]`, `constant:c` or `random:scale`.
    #[arg(long)]
    init: Option<String>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    grad_tol: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write DOT output.
    #[arg(long)]
    dot: bool,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    run: RunArgs,
    /// `nehari` or `mountain_pass`.
    #[arg(long)]
    method: Option<String>,
    /// Prior summary JSON whose level is compared with this run.
    #[arg(long)]
    compare: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExhaustionArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Comma-separated radii, e.g. `10,20,30`.
    #[arg(long, value_delimiter = ',')]
    radii: Option<Vec<usize>>,
}

#[derive(Debug, Subcommand)]
enum VerifyCommand {
    Example1(SeriesArgs),
    Example2(SeriesArgs),
    Cepsilon(CepsArgs),
}

#[derive(Debug, Args)]
struct SeriesArgs {
    /// Largest radius; partial sums are reported at each decade from 10^3 and at N.
    #[arg(long, default_value = "1e6")]
    n: String,
    /// Explicit comma-separated schedule, overrides --n.
    #[arg(long, value_delimiter = ',')]
    schedule: Option<Vec<u64>>,
    /// Directory for the report JSON and the per-series CSV files.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CepsArgs {
    #[arg(long)]
    eps: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct ExportDotArgs {
    /// Family spec or graph JSON path.
    #[arg(long)]
    graph: String,
    /// Graph JSON carrying `u` values to label the vertices with.
    #[arg(long)]
    solution: Option<PathBuf>,
    /// Destination file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// An error together with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn config(e: impl fmt::Display) -> Self {
        Self {
            code: 1,
            message: e.to_string(),
        }
    }
}

fn init_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("GRAPHLOG_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::config(format!("GRAPHLOG_THREADS must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(Failure::config)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = init_threads().and_then(|()| match cli.command {
        Command::Solve(args) => run::solve(args),
        Command::Exhaustion(args) => run::exhaustion(args),
        Command::Verify(cmd) => run::verify(cmd),
        Command::ExportDot(args) => run::export_dot(args),
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
