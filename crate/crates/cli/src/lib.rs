//! The `fhl` command-line tool.

pub mod args;
mod commands;
pub mod config;
pub mod manifest;
pub mod svg;

use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;
use fhl_core::Error;

use args::Cli;
use manifest::{FileDigest, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_QUALITY: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(Error::Io(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(Error::Json(e))
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(s) => write!(f, "{s}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(e) => match e {
                Error::Resource { .. } | Error::DepthExceeded { .. } => EXIT_RESOURCE,
                Error::Convergence { .. }
                | Error::Window(_)
                | Error::Continuation { .. }
                | Error::AtPole { .. }
                | Error::NonSimplePole { .. }
                | Error::UnmatchedConjugate { .. }
                | Error::Resolution { .. }
                | Error::Coverage { .. }
                | Error::Divergent { .. } => EXIT_QUALITY,
                _ => EXIT_USAGE,
            },
        }
    }
}

/// What a command read and wrote, and how it wants to exit.
#[derive(Debug, Default)]
pub struct Outcome {
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub seed: Option<u64>,
    pub status: i32,
}

fn configure_threads() -> usize {
    if let Some(n) = std::env::var("FHL_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            // Fails only if a pool already exists, e.g. when called twice in tests.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    rayon::current_num_threads()
}

/// Runs the tool on a full argument vector and returns the exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let argv = match config::expand(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("fhl: {e}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let threads = configure_threads();
    if let Err(e) = std::fs::create_dir_all(&cli.out) {
        eprintln!("fhl: cannot create {}: {e}", cli.out.display());
        return EXIT_USAGE;
    }
    let started = Instant::now();
    let result = commands::dispatch(&cli);
    let (outcome, code) = match result {
        Ok(o) => {
            let code = o.status;
            (o, code)
        }
        Err(e) => {
            eprintln!("fhl: {e}");
            (Outcome::default(), e.exit_code())
        }
    };
    let name = cli.command.name();
    let digest = |paths: &[PathBuf]| -> Vec<FileDigest> { paths.iter().filter_map(|p| FileDigest::of(p).ok()).collect() };
    let m = RunManifest {
        command: name.to_owned(),
        args: argv[1..].to_vec(),
        parameters: serde_json::to_value(&cli.command).unwrap_or(serde_json::Value::Null),
        version: env!("CARGO_PKG_VERSION").to_owned(),
        seed: outcome.seed,
        threads,
        inputs: digest(&outcome.inputs),
        outputs: digest(&outcome.outputs),
        wall_time: started.elapsed().as_secs_f64(),
        exit_code: code,
    };
    let path = cli.out.join(format!("{name}.manifest.json"));
    match serde_json::to_string_pretty(&m) {
        Ok(s) => {
            if let Err(e) = std::fs::write(&path, s) {
                eprintln!("fhl: cannot write {}: {e}", path.display());
            }
        }
        Err(e) => eprintln!("fhl: manifest: {e}"),
    }
    code
}
