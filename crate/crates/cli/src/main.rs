//! trion-floquet: quasienergy spectra, trajectories, survival-probability
//! scans and entanglement series for an ac-driven two-site trion, emitted as
//! plot-ready CSV or JSON.

mod commands;
mod config;
mod output;
mod presets;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{apply_override, merge_json, OutputFormat, RunConfig};
use output::Table;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numerical(m) | CliError::Io(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "trion-floquet",
    version,
    about = "Driven double-dot trion simulator: Floquet spectra, dynamics, entanglement"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Quasienergy sweep over the drive amplitude (plus optional pmin columns).
    Spectrum(RunArgs),
    /// Time evolution: populations and amplitudes.
    Evolve(RunArgs),
    /// Concurrence and Bell-overlap series.
    Entangle(RunArgs),
    /// Exact/avoided crossing events in a sweep.
    Crossings(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration; merged over the preset when both are given.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in parameter set: fig1, fig3, fig4, fig5, fig6, fig7, fig9, fig10.
    #[arg(long)]
    preset: Option<String>,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Dotted-path configuration overrides, e.g. model.phi=24.6.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}

type CommandRunner = fn(&RunConfig) -> Result<Table, CliError>;

fn run(cli: Cli) -> Result<(), CliError> {
    let (args, runner): (&RunArgs, CommandRunner) = match &cli.command {
        Command::Spectrum(a) => (a, commands::cmd_spectrum),
        Command::Evolve(a) => (a, commands::cmd_evolve),
        Command::Entangle(a) => (a, commands::cmd_entangle),
        Command::Crossings(a) => (a, commands::cmd_crossings),
    };

    let config = load_config(args)?;
    config.validate()?;

    let workers = worker_count(&config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot build worker pool: {e}")))?;
    let table = pool.install(|| runner(&config))?;

    write_table(&table, &config)
}

fn load_config(args: &RunArgs) -> Result<RunConfig, CliError> {
    let mut value = match &args.preset {
        Some(name) => {
            let preset = presets::preset(name).ok_or_else(|| {
                CliError::Config(format!(
                    "unknown preset '{name}' (available: {})",
                    presets::PRESET_NAMES.join(", ")
                ))
            })?;
            serde_json::to_value(&preset)
                .map_err(|e| CliError::Config(format!("cannot encode preset: {e}")))
        }
        None => Ok(serde_json::Value::Object(serde_json::Map::new())),
    }?;

    match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Config(format!("cannot read config {}: {e}", path.display()))
            })?;
            let patch: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("config parse failure: {e}")))?;
            merge_json(&mut value, patch);
        }
        None => {
            if args.preset.is_none() {
                return Err(CliError::Config(
                    "provide --preset and/or --config".into(),
                ));
            }
        }
    }

    for spec in &args.overrides {
        apply_override(&mut value, spec)?;
    }

    let mut config: RunConfig = serde_json::from_value(value)
        .map_err(|e| CliError::Config(format!("invalid configuration: {e}")))?;
    if let Some(out) = &args.out {
        config.output.path = Some(out.clone());
    }
    if let Some(format) = args.format {
        config.output.format = match format {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        };
    }
    Ok(config)
}

fn worker_count(config: &RunConfig) -> Result<usize, CliError> {
    if let Ok(raw) = std::env::var("TRION_FLOQUET_WORKERS") {
        let n: usize = raw
            .parse()
            .map_err(|_| CliError::Config(format!("TRION_FLOQUET_WORKERS='{raw}' is not a count")))?;
        if n == 0 {
            return Err(CliError::Config("worker count must be positive".into()));
        }
        return Ok(n);
    }
    if let Some(n) = config.workers {
        if n == 0 {
            return Err(CliError::Config("worker count must be positive".into()));
        }
        return Ok(n);
    }
    Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

fn write_table(table: &Table, config: &RunConfig) -> Result<(), CliError> {
    let io_err = |e: std::io::Error| CliError::Io(e.to_string());
    match &config.output.path {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(io_err)?;
            let mut writer = std::io::BufWriter::new(file);
            match config.output.format {
                OutputFormat::Csv => table.write_csv(&mut writer).map_err(io_err)?,
                OutputFormat::Json => table.write_json(&mut writer).map_err(io_err)?,
            }
            use std::io::Write;
            writer.flush().map_err(io_err)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            match config.output.format {
                OutputFormat::Csv => table.write_csv(&mut lock).map_err(io_err),
                OutputFormat::Json => table.write_json(&mut lock).map_err(io_err),
            }
        }
    }
}
