use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mdict_harness::{bench, generate, verify, write_csv, GenKind, WhichImpl, Workload};

#[derive(Parser)]
#[command(
    name = "mdict-harness",
    about = "Workload generation, verification and benchmarking for the mergeable dictionary"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a deterministic workload file.
    Gen {
        /// random | interleave | sorted-merge
        #[arg(long, value_parser = parse_kind)]
        kind: GenKind,
        /// Universe size.
        #[arg(long)]
        n: u64,
        /// Number of operations.
        #[arg(long)]
        ops: usize,
        /// Generator seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file.
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Replay a workload against the brute-force oracle in lockstep.
    Verify {
        /// mdict | baseline
        #[arg(long = "impl", value_parser = parse_impl)]
        which: WhichImpl,
        /// Compare full state every this many operations.
        #[arg(long, default_value_t = 100)]
        snapshot_every: usize,
        file: PathBuf,
    },
    /// Replay a workload and emit per-operation metrics as CSV.
    Bench {
        /// mdict | baseline
        #[arg(long = "impl", value_parser = parse_impl)]
        which: WhichImpl,
        file: PathBuf,
        /// CSV output file; stdout when absent.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn parse_kind(s: &str) -> Result<GenKind, String> {
    s.parse()
}

fn parse_impl(s: &str) -> Result<WhichImpl, String> {
    s.parse()
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.cmd {
        Cmd::Gen {
            kind,
            n,
            ops,
            seed,
            out,
        } => {
            let w = generate(kind, n, ops, seed).map_err(|e| e.to_string())?;
            fs::write(&out, w.to_text()).map_err(|e| format!("{}: {e}", out.display()))?;
            println!(
                "wrote {} ops over universe {} to {}",
                w.ops.len(),
                w.n,
                out.display()
            );
            Ok(())
        }
        Cmd::Verify {
            which,
            snapshot_every,
            file,
        } => {
            let text = fs::read_to_string(&file).map_err(|e| format!("{}: {e}", file.display()))?;
            let w = Workload::parse(&text).map_err(|e| e.to_string())?;
            let report = verify(&w, which, snapshot_every)?;
            println!(
                "verify {which}: pass ({} ops, {} unions skipped, {} snapshots)",
                report.ops, report.unions_skipped, report.snapshots
            );
            Ok(())
        }
        Cmd::Bench { which, file, out } => {
            let text = fs::read_to_string(&file).map_err(|e| format!("{}: {e}", file.display()))?;
            let w = Workload::parse(&text).map_err(|e| e.to_string())?;
            let rows = bench(&w, which);
            match out {
                Some(path) => {
                    let mut buf = Vec::new();
                    write_csv(&rows, &mut buf).map_err(|e| e.to_string())?;
                    fs::write(&path, buf).map_err(|e| format!("{}: {e}", path.display()))?;
                    println!("wrote {} rows to {}", rows.len(), path.display());
                }
                None => {
                    let stdout = std::io::stdout();
                    write_csv(&rows, &mut stdout.lock()).map_err(|e| e.to_string())?;
                }
            }
            Ok(())
        }
    }
}
