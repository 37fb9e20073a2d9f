//! `mesozeta [--config PATH] [--out PATH] [--seed U64] [--jobs N] <command> [--key value]...`

mod commands;
mod config;
mod error;
mod tables;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;
use serde_json::json;

use commands::{check_output, write_atomic, Plan};
use config::{ConfigFile, RunConfig, COMMANDS};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "mesozeta", version, about = "Zeta zero statistics and their random-matrix mirror")]
struct Args {
    /// Configuration file with `[command]` sections.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Where to write the JSON record; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    jobs: Option<usize>,
    /// One of zeros-compute, zeros-fetch, zeros-verify, clt, explicit, fujii,
    /// density-synth, density-windows, cue.
    command: String,
    /// Command keys as `--key value` or `--key=value`.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
    keys: Vec<String>,
}

/// Splits trailing `--key value` pairs; the global flags may appear here too.
fn split_keys(args: &mut Args) -> Result<Vec<(String, String)>, CliError> {
    let mut pairs = Vec::new();
    let mut it = std::mem::take(&mut args.keys).into_iter();
    while let Some(token) = it.next() {
        let Some(key) = token.strip_prefix("--") else {
            return Err(CliError::Usage(format!("expected `--key value`, found `{token}`")));
        };
        let (key, value) = match key.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => {
                let value = it.next().ok_or_else(|| CliError::Usage(format!("`--{key}` needs a value")))?;
                (key.to_string(), value)
            }
        };
        let number = |what: &str| CliError::Type { key: key.clone(), value: value.clone(), expected: what.into() };
        match key.as_str() {
            "config" => args.config = Some(PathBuf::from(&value)),
            "out" => args.out = Some(PathBuf::from(&value)),
            "seed" => args.seed = Some(value.parse().map_err(|_| number("a 64-bit unsigned integer"))?),
            "jobs" => args.jobs = Some(value.parse().map_err(|_| number("a positive integer"))?),
            _ => pairs.push((key, value)),
        }
    }
    Ok(pairs)
}

fn run(mut args: Args) -> Result<(), CliError> {
    if !COMMANDS.contains(&args.command.as_str()) {
        return Err(CliError::UnknownCommand(args.command));
    }
    let flags = split_keys(&mut args)?;
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            Some(ConfigFile::parse(&text, path)?)
        }
        None => None,
    };
    let run = RunConfig::resolve(&args.command, file.as_ref(), &flags, args.out, args.seed, args.jobs)?;
    check_output("out", run.out.as_deref())?;
    let plan = Plan::new(&run)?;

    if let Some(jobs) = run.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {jobs} workers: {e}")))?;
    }
    let outcome = plan.execute(run.master_seed)?;
    for (path, bytes) in &outcome.artifacts {
        write_atomic(path, bytes)?;
    }
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let record = json!({
        "command": run.command,
        "config": run.echo(),
        "result": outcome.result,
        "timestamp": timestamp,
    });
    let mut text = serde_json::to_string_pretty(&record).expect("record serializes");
    text.push('\n');
    match &run.out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let err = CliError::Usage(e.to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
