//! Command-line runner for the exact kernel estimates: one subcommand per
//! estimate, CSV or JSON report rows, and an exit code CI can gate on.

mod command;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use walshlab::lab::{self, LemmaReport};

pub use command::{Command, Job};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

pub const OUT_DIR_ENV: &str = "WALSHLAB_OUT_DIR";

#[derive(ValueEnum, Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }

    pub fn render(self, reports: &[LemmaReport], timing: bool) -> String {
        match self {
            Format::Csv => lab::to_csv(reports, timing),
            Format::Json => lab::to_json(reports, timing),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "walshlab", version, about = "Exact Walsh-Fejer kernel estimates and convergence experiments")]
pub struct Cli {
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output file; defaults to $WALSHLAB_OUT_DIR/<name>.<ext>, else stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Seed for default test functions.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Fill the ms column with wall-clock times.
    #[arg(long, global = true)]
    timing: bool,
    /// Expand each subcommand over its parameter grid.
    #[arg(long, global = true)]
    sweep: bool,
    /// TOML run file with [[run]] entries; replaces the subcommand.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

/// A declarative run: global settings plus the subcommands to execute in
/// order, all written to one table.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub timing: bool,
    #[serde(default)]
    pub sweep: bool,
    #[serde(default)]
    pub run: Vec<Command>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| format!("invalid run file: {e}"))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configs serialize")
    }

    /// Validates every run and returns the jobs; nothing is computed.
    pub fn prepare(&self) -> Result<Vec<Job>, String> {
        if self.run.is_empty() {
            return Err("nothing to run: give a subcommand or a run file with [[run]] entries".into());
        }
        if self.threads == Some(0) {
            return Err("invalid parameter threads: must be at least 1".into());
        }
        self.run
            .iter()
            .map(|c| c.prepare(self.sweep, self.seed).map_err(|e| format!("{}: {e}", c.name())))
            .collect()
    }

    /// Runs every job on a pool of the configured size; rows keep run order.
    pub fn execute(&self, jobs: Vec<Job>) -> Result<Vec<LemmaReport>, String> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.threads {
            builder = builder.num_threads(n);
        }
        let pool = builder.build().map_err(|e| format!("thread pool: {e}"))?;
        pool.install(|| {
            let mut out = Vec::new();
            for job in jobs {
                out.extend(job().map_err(|e| e.to_string())?);
            }
            Ok(out)
        })
    }

    fn destination(&self, stem: &str) -> Option<PathBuf> {
        self.output.clone().or_else(|| {
            std::env::var_os(OUT_DIR_ENV).map(|dir| Path::new(&dir).join(format!("{stem}.{}", self.format.extension())))
        })
    }
}

fn merge(cli: Cli) -> Result<(RunConfig, String), String> {
    let (mut config, stem) = match (&cli.config, cli.command) {
        (Some(_), Some(command)) => {
            return Err(format!("--config replaces the subcommand; drop `{}`", command.name()));
        }
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let stem = path.file_stem().map_or("run".into(), |s| s.to_string_lossy().into_owned());
            (RunConfig::from_toml(&text)?, stem)
        }
        (None, Some(command)) => {
            let stem = command.name().to_owned();
            (
                RunConfig {
                    run: vec![command],
                    ..RunConfig::default()
                },
                stem,
            )
        }
        (None, None) => return Err("nothing to run: give a subcommand or --config".into()),
    };
    if cli.threads.is_some() {
        config.threads = cli.threads;
    }
    if let Some(f) = cli.format {
        config.format = f;
    }
    if cli.output.is_some() {
        config.output = cli.output;
    }
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    config.timing |= cli.timing;
    config.sweep |= cli.sweep;
    Ok((config, stem))
}

fn run_parsed(cli: Cli) -> Result<bool, String> {
    let (config, stem) = merge(cli)?;
    let jobs = config.prepare()?;
    let reports = config.execute(jobs)?;
    let text = config.format.render(&reports, config.timing);
    match config.destination(&stem) {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
            }
            std::fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))?;
        }
        None => print!("{text}"),
    }
    Ok(reports.iter().all(LemmaReport::passed))
}

/// Parses `args` (program name first), runs, and returns the exit code:
/// 0 when every check passes, 1 when any fails, 2 on invalid input.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_PASS };
        }
    };
    match run_parsed(cli) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            eprintln!("walshlab: {e}");
            EXIT_INVALID
        }
    }
}
