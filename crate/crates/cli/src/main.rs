use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dgforge_cli::{emit_trace, run_pipeline, validate_fixture, Report, SCHEMA};

/// Default directory for report files when `--out` is absent.
const OUT_DIR_VAR: &str = "DGFORGE_OUT_DIR";

#[derive(Parser)]
#[command(name = "dgforge", version, about = "Run verification pipelines on fixture files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one pipeline over every matching request in a fixture.
    Run {
        file: PathBuf,
        #[arg(long)]
        pipeline: String,
        /// Print the step-by-step trace (hull and lift only).
        #[arg(long)]
        trace: bool,
        /// Write the JSON report here and print a text summary.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a fixture without running pipelines.
    Validate { file: PathBuf },
    /// Print the fixture JSON schema.
    Schema,
}

fn input_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn verdict(r: &Report) -> ExitCode {
    if r.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn emit(report: &Report, out: Option<PathBuf>) -> Result<(), String> {
    match out {
        Some(path) => {
            std::fs::write(&path, report.to_json()).map_err(|e| format!("writing {}: {e}", path.display()))?;
            print!("{}", report.to_text());
        }
        None => print!("{}", report.to_json()),
    }
    Ok(())
}

fn default_out(file: &Path, pipeline: &str) -> Option<PathBuf> {
    let dir = std::env::var_os(OUT_DIR_VAR)?;
    let stem = file.file_stem().map_or("report".into(), |s| s.to_string_lossy().into_owned());
    Some(PathBuf::from(dir).join(format!("{stem}.{pipeline}.json")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Schema => {
            print!("{SCHEMA}");
            ExitCode::SUCCESS
        }
        Command::Validate { file } => {
            let text = match std::fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) => return input_error(format!("reading {}: {e}", file.display())),
            };
            match validate_fixture(&text) {
                Ok(r) => {
                    print!("{}", r.to_text());
                    verdict(&r)
                }
                Err(e) => input_error(e),
            }
        }
        Command::Run { file, pipeline, trace, out } => {
            let text = match std::fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) => return input_error(format!("reading {}: {e}", file.display())),
            };
            if trace {
                return match emit_trace(&text, &pipeline) {
                    Ok(t) => {
                        print!("{t}");
                        ExitCode::SUCCESS
                    }
                    Err(e) => input_error(e),
                };
            }
            let report = match run_pipeline(&text, &pipeline) {
                Ok(r) => r,
                Err(e) => return input_error(e),
            };
            let out = out.or_else(|| default_out(&file, &pipeline));
            if let Err(e) = emit(&report, out) {
                return input_error(e);
            }
            verdict(&report)
        }
    }
}
