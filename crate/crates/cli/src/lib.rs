//! Command-line front end: configuration, presets and the sweep commands.

pub mod commands;
pub mod config;
pub mod presets;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use optoarray::selftest::Fault;

use crate::commands::{CommandError, Output};
use crate::config::{Config, ConfigError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "optoarray", version, about = "Transfer-matrix sweeps for scatterer arrays in optical cavities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct RunArgs {
    /// Configuration file (key = value with [section] headers).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Built-in preset, applied before --config.
    #[arg(long)]
    pub preset: Option<String>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Inject {
    None,
    ElementSign,
    Chebyshev,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stack reflectivity, transmission and absorption versus spacing.
    ScanStack(RunArgs),
    /// Cavity transmission versus displacement and wavenumber.
    CavityMap(RunArgs),
    /// Coupling strengths, effective lengths and cooperativity.
    Coupling(RunArgs),
    /// Linewidths with an absorbing stack.
    Absorption(RunArgs),
    /// Element count maximizing the collective coupling.
    Optimize(RunArgs),
    /// Run the invariant suite.
    Selftest {
        /// Deliberately break a primitive to exercise the checks.
        #[arg(long, value_enum, default_value = "none")]
        inject: Inject,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// List the built-in presets.
    Presets,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::ScanStack(_) => "scan-stack",
            Command::CavityMap(_) => "cavity-map",
            Command::Coupling(_) => "coupling",
            Command::Absorption(_) => "absorption",
            Command::Optimize(_) => "optimize",
            Command::Selftest { .. } => "selftest",
            Command::Presets => "presets",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Command(#[from] CommandError),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Command(CommandError::Config(e))
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Command(e) if e.is_numeric() => EXIT_NUMERIC,
            _ => EXIT_VALIDATION,
        }
    }
}

/// Loads the preset (if any) and then the config file on top of it.
pub fn load_config(args: &RunArgs, command: &str) -> Result<Config, CliError> {
    let mut cfg = Config::default();
    if let Some(name) = &args.preset {
        let text = presets::get(name)?;
        if let Some(cmd) = presets::command_of(text) {
            if cmd != command {
                return Err(CliError::Usage(format!("preset {name} is for the {cmd} command")));
            }
        }
        cfg.merge(text)?;
    }
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        cfg.merge(&text)?;
    }
    Ok(cfg)
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        if w == 0 {
            return Err(CliError::Usage("--workers must be positive".into()));
        }
        builder = builder.num_threads(w);
    }
    builder.build().map_err(|e| CliError::Io(e.to_string()))
}

/// Full provenance block: tool version, command and resolved configuration.
fn provenance(command: &str, cfg: &Config) -> Vec<String> {
    let mut lines = vec![
        format!("optoarray {}", env!("CARGO_PKG_VERSION")),
        format!("command = {command}"),
    ];
    lines.extend(cfg.resolved_lines());
    lines
}

fn emit(output: &Output, out: Option<&PathBuf>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    if let Some(table) = &output.table {
        match out {
            Some(path) => fs::write(path, table.to_csv()).map_err(io)?,
            None => table.write_csv(stdout).map_err(io)?,
        }
    }
    if !output.text.is_empty() {
        stdout.write_all(output.text.as_bytes()).map_err(io)?;
    }
    Ok(())
}

/// Runs one parsed invocation, writing results to `stdout` or the output
/// file and diagnostics to `stderr`. Returns the process exit code.
pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match execute(cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

type Runner = fn(&Config) -> Result<Output, CommandError>;

fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let name = cli.command.name();
    let (args, f): (RunArgs, Runner) = match cli.command {
        Command::Presets => {
            for p in presets::names() {
                writeln!(stdout, "{p}").map_err(|e| CliError::Io(e.to_string()))?;
            }
            return Ok(EXIT_OK);
        }
        Command::Selftest { inject, workers } => {
            let fault = match inject {
                Inject::None => Fault::None,
                Inject::ElementSign => Fault::ElementSignFlip,
                Inject::Chebyshev => Fault::PerturbedChebyshev,
            };
            let output = pool(workers)?.install(|| commands::selftest(fault));
            emit(&output, None, stdout)?;
            return Ok(if output.failures == 0 { EXIT_OK } else { EXIT_NUMERIC });
        }
        Command::ScanStack(a) => (a, commands::scan_stack),
        Command::CavityMap(a) => (a, commands::cavity_map),
        Command::Coupling(a) => (a, commands::coupling),
        Command::Absorption(a) => (a, commands::absorption),
        Command::Optimize(a) => (a, commands::optimize),
    };
    let cfg = load_config(&args, name)?;
    let mut output = pool(args.workers)?.install(|| f(&cfg))?;
    for w in &output.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    if let Some(table) = &mut output.table {
        let mut header = provenance(name, &cfg);
        header.append(&mut table.provenance);
        table.provenance = header;
    }
    emit(&output, args.out.as_ref(), stdout)?;
    Ok(EXIT_OK)
}
