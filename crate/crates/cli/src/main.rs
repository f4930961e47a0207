use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fockflow_cli::{run, Config, Suite};

#[derive(Parser)]
#[command(name = "fockflow", version, about = "Verification suites for finite models of Clifford and free flows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and report every check.
    Run {
        #[arg(value_enum)]
        suite: Suite,
        /// Plain `key = value` configuration file.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the full report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Write one CSV row per check.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Number of cells `m`.
        #[arg(long)]
        cells: Option<usize>,
        /// Internal dimension `n`.
        #[arg(long)]
        rank: Option<usize>,
        /// Refinement depth of the addit computations.
        #[arg(long)]
        depth: Option<u32>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Run { suite, config, seed, json, csv, cells, rank, depth } = cli.command;
    let mut cfg = match config {
        Some(p) => match Config::from_file(&p) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("{e}");
                return ExitCode::from(2);
            }
        },
        None => Config::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.cells = cells.or(cfg.cells);
    cfg.rank = rank.or(cfg.rank);
    cfg.depth = depth.unwrap_or(cfg.depth);
    if let Err(e) = cfg.validate() {
        eprintln!("{e}");
        return ExitCode::from(2);
    }

    let report = run(suite, &cfg);
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = report.print(&mut stdout) {
        eprintln!("cannot print report: {e}");
    }
    if let Some(p) = json {
        if let Err(e) = report.write_json(&p) {
            eprintln!("cannot write {}: {e}", p.display());
            return ExitCode::from(2);
        }
    }
    if let Some(p) = csv {
        if let Err(e) = report.write_csv(&p) {
            eprintln!("cannot write {}: {e}", p.display());
            return ExitCode::from(2);
        }
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
