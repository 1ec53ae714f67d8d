//! Command-line driver for `maglat-core`.

pub mod config;
pub mod error;
pub mod output;
pub mod tasks;

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;
use serde_json::{json, Value};

use crate::config::{apply_override, parse_config, parse_document, Format, Task};
use crate::error::{CliError, CliResult};
use crate::output::{render_json, write_atomic};

#[derive(Debug, Parser)]
#[command(name = "maglat", version, about = "Magnetic lattice topology computations")]
pub struct Cli {
    /// Task to run.
    #[arg(value_enum)]
    pub task: Task,
    /// JSON config file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, overriding the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Config overrides `key.path=value`, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("MAGLAT_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::config("MAGLAT_THREADS", format!("expected a positive integer, got {raw:?}")))?;
    // A pool that is already built (repeated calls in one process) is kept.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Runs one invocation and returns its exit code; diagnostics go to stderr.
pub fn run(cli: &Cli) -> u8 {
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("maglat: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> CliResult<u8> {
    configure_threads()?;
    let text = fs::read_to_string(&cli.config)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", cli.config.display())))?;
    let mut doc = parse_document(&text)?;
    for s in &cli.set {
        apply_override(&mut doc, s)?;
    }
    let mut config = parse_config(&doc, Some(cli.task))?;
    if let Some(out) = &cli.out {
        config.output_directory = out.clone();
    }
    fs::create_dir_all(&config.output_directory)?;

    let start = Instant::now();
    let outcome = tasks::run_task(&config);
    let wall = start.elapsed().as_secs_f64();
    let (status, code, result, tables, error) = match outcome {
        Ok(t) if t.converged => ("ok", 0u8, t.result, t.tables, None),
        Ok(t) => ("non_converged", 3, t.result, t.tables, Some("result is not within 0.1 of an integer".to_string())),
        Err(e @ CliError::Numerical(_)) => ("numerical_failure", 3, Value::Null, Vec::new(), Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let report = json!({
        "task": config.task.name(),
        "config": config.to_json(),
        "status": status,
        "exit_code": code,
        "error": error,
        "result": result,
        "tables": tables.iter().map(|t| format!("{}.csv", t.name)).collect::<Vec<_>>(),
        "tool_version": env!("CARGO_PKG_VERSION"),
        "wall_time_seconds": wall,
    });
    if config.formats.contains(&Format::Csv) {
        for t in &tables {
            let bytes = t.to_csv().map_err(|e| CliError::Io(e.to_string()))?;
            write_atomic(&config.output_directory.join(format!("{}.csv", t.name)), &bytes)?;
        }
    }
    if config.formats.contains(&Format::Json) {
        write_atomic(&config.output_directory.join("report.json"), render_json(&report).as_bytes())?;
    }
    if let Some(e) = error {
        eprintln!("maglat: {e}");
    }
    Ok(code)
}
