//! The `isospec` command-line tool.
//!
//! Exit codes: 0 success, 1 some pairs failed, 2 input error, 3 internal
//! error. Diagnostics go to stderr; reports go to stdout or `--output`.

pub mod args;
pub mod cache;
pub mod commands;
pub mod config;
pub mod plot;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;

use clap::Parser;

use args::Cli;
use config::{parse_config_text, Format, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARTIAL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Internal,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Input,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Internal,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Input => EXIT_INPUT,
            ErrorKind::Internal => EXIT_INTERNAL,
        }
    }

    fn kind_name(&self) -> &'static str {
        match self.kind {
            ErrorKind::Input => "input",
            ErrorKind::Internal => "internal",
        }
    }

    fn report(&self, format: Format) {
        if format == Format::Json {
            let v = serde_json::json!({
                "error": {
                    "kind": self.kind_name(),
                    "exit_code": self.exit_code(),
                    "message": self.message,
                }
            });
            eprintln!("{v}");
        } else {
            eprintln!("error[{}]: {}", self.kind_name(), self.message);
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<isospec::Error> for CliError {
    fn from(e: isospec::Error) -> Self {
        match e {
            isospec::Error::Numerical(_) => CliError::internal(e.to_string()),
            _ => CliError::input(e.to_string()),
        }
    }
}

fn init_logging(verbose: u8, quiet: bool) {
    let level = match (quiet, verbose) {
        (true, _) => log::LevelFilter::Error,
        (false, 0) => log::LevelFilter::Warn,
        (false, 1) => log::LevelFilter::Info,
        (false, _) => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .parse_env(env_logger::Env::new().filter("ISOSPEC_LOG"))
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .try_init();
}

/// Defaults, then the config file, then environment and flags.
pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut kv: BTreeMap<String, String> = BTreeMap::new();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        kv = parse_config_text(&text, &path.display().to_string())?;
    }
    kv.extend(cli.to_kv());
    let cfg = RunConfig::from_kv(&kv)?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(feature = "parallel")]
fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::internal(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    if workers.is_some_and(|w| w > 1) {
        log::warn!("built without the parallel feature; --workers is ignored");
    }
    Ok(f())
}

/// Runs the tool on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    init_logging(cli.verbose, cli.quiet);
    let hint = cli
        .format
        .as_deref()
        .and_then(|f| f.parse().ok())
        .unwrap_or(Format::Text);
    let cfg = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => {
            e.report(hint);
            return e.exit_code();
        }
    };
    if cli.print_config {
        print!("{}", cfg.to_file_string());
        return EXIT_OK;
    }
    let result = with_workers(cfg.workers, || commands::execute(&cfg))
        .and_then(|r| r)
        .and_then(|out| commands::emit(&cfg, &out.body).map(|_| out.failures));
    match result {
        Ok(0) => EXIT_OK,
        Ok(n) => {
            log::warn!("{n} pair computations failed");
            EXIT_PARTIAL
        }
        Err(e) => {
            e.report(cfg.format);
            e.exit_code()
        }
    }
}
