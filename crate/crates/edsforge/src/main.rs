use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use edsforge::{output, run_many, select, LoadOptions, RunOptions, Workspace};
use edsforge_core::report::Status;

#[derive(Parser)]
#[command(name = "edsforge", version, about = "Run verification tasks from .eds files")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum PartialMode {
    Allow,
    Forbid,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a task or suite (default: every task of the file).
    Run {
        file: PathBuf,
        #[arg(long)]
        task: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        jet_order: Option<usize>,
        #[arg(long, default_value_t = 3)]
        fibre_order: usize,
        #[arg(long, value_enum, default_value_t = PartialMode::Allow)]
        partial_mode: PartialMode,
        /// Show passing residuals too.
        #[arg(long, short)]
        verbose: bool,
    },
    /// Print a file in canonical form.
    Fmt { file: PathBuf },
}

fn threads() -> Option<usize> {
    std::env::var("EDSFORGE_THREADS").ok().and_then(|v| v.trim().parse().ok())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.cmd {
        Cmd::Fmt { file } => {
            let src = match std::fs::read_to_string(&file) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("{}: {}", file.display(), e);
                    return ExitCode::from(2);
                }
            };
            match edsforge::parse(&src) {
                Ok(doc) => {
                    print!("{}", edsforge::printer::print_document(&doc));
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("{}:{}", file.display(), e);
                    ExitCode::from(2)
                }
            }
        }
        Cmd::Run { file, task, seed, json, jet_order, fibre_order, partial_mode, verbose } => {
            let ws = match Workspace::load(&file, &LoadOptions { jet_order }) {
                Ok(w) => w,
                Err(e) => {
                    eprintln!("{}", e);
                    return ExitCode::from(2);
                }
            };
            let (names, single) = match select(&ws, task.as_deref()) {
                Ok(x) => x,
                Err(e) => {
                    eprintln!("{}", e);
                    return ExitCode::from(2);
                }
            };
            let opts = RunOptions { seed, fibre_order, allow_partial: matches!(partial_mode, PartialMode::Allow), ..RunOptions::default() };
            let outcomes = run_many(&ws, &names, &opts, threads());
            print!("{}", output::to_text(&outcomes, verbose));
            if let Some(p) = json {
                if let Err(e) = std::fs::write(&p, output::to_json(&outcomes, single)) {
                    eprintln!("{}: {}", p.display(), e);
                    return ExitCode::from(2);
                }
            }
            if outcomes.iter().all(|o| o.status == Status::Pass) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
