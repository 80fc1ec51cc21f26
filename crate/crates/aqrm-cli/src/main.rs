//! Command-line batch driver: `aqrm scan` runs a one-axis spectrum scan,
//! `aqrm map` a two-axis parameter map. Results land as CSV/JSON tables plus
//! a metadata document; see `--help` for the flags.

use std::io::IsTerminal;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use aqrm::output::emit_outputs;
use aqrm::sweep::{run_parameter_map, run_spectrum_scan, Format, Mode, SweepConfig, SweepTable};

#[derive(Parser)]
#[command(
    name = "aqrm",
    version,
    about = "Spectrum scans and parameter maps of the asymmetric quantum Rabi model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a spectrum scan over one swept axis.
    Scan(RunArgs),
    /// Run a parameter map over two swept axes.
    Map(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config; default ./aqrm_out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 picks the number of cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Output data format.
    #[arg(long, value_parser = ["csv", "json", "both"])]
    format: Option<String>,
    /// Also emit static SVG plots.
    #[arg(long)]
    plots: bool,
    /// Chattier progress reporting on stderr.
    #[arg(long)]
    verbose: bool,
}

fn paint_error(msg: &str) -> String {
    let color_ok = std::io::stderr().is_terminal() && std::env::var_os("NO_COLOR").is_none();
    if color_ok {
        format!("\x1b[31merror:\x1b[0m {msg}")
    } else {
        format!("error: {msg}")
    }
}

fn resolve_formats(args: &RunArgs, config: &SweepConfig) -> Vec<Format> {
    match args.format.as_deref() {
        Some("csv") => vec![Format::Csv],
        Some("json") => vec![Format::Json],
        Some("both") => vec![Format::Csv, Format::Json],
        _ => config
            .output
            .formats
            .clone()
            .unwrap_or_else(|| vec![Format::Csv]),
    }
}

fn resolve_outdir(args: &RunArgs, config: &SweepConfig) -> PathBuf {
    args.out
        .clone()
        .or_else(|| config.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("aqrm_out"))
}

fn execute(args: &RunArgs, expected_mode: Mode) -> Result<(SweepTable, SweepConfig), String> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| format!("cannot read {}: {e}", args.config.display()))?;
    let config = SweepConfig::from_json_str(&text).map_err(|e| e.to_string())?;
    if config.mode != expected_mode {
        let (want, got) = match expected_mode {
            Mode::SpectrumScan => ("scan", "parameter-map"),
            Mode::ParameterMap => ("map", "spectrum-scan"),
        };
        return Err(format!("subcommand `{want}` given a {got} configuration"));
    }
    let run = || match expected_mode {
        Mode::SpectrumScan => run_spectrum_scan(&config),
        Mode::ParameterMap => run_parameter_map(&config),
    };
    let table = if args.threads == 0 {
        run()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(args.threads)
            .build()
            .map_err(|e| e.to_string())?;
        pool.install(run)
    }
    .map_err(|e| e.to_string())?;
    Ok((table, config))
}

fn run_command(args: &RunArgs, mode: Mode) -> ExitCode {
    let started = Instant::now();
    let (table, config) = match execute(args, mode) {
        Ok(v) => v,
        Err(msg) => {
            eprintln!("{}", paint_error(&msg));
            return ExitCode::from(1);
        }
    };
    let outdir = resolve_outdir(args, &config);
    let formats = resolve_formats(args, &config);
    let plots = args.plots || config.output.plots;
    let emitted = match emit_outputs(&table, &config, &outdir, &formats, plots) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("{}", paint_error(&format!("writing outputs: {e}")));
            return ExitCode::from(1);
        }
    };
    if args.verbose {
        eprintln!(
            "{} records, {} failed points, {} warnings in {:.1?}",
            table.records.len(),
            table.failures.len(),
            table.warnings.len(),
            started.elapsed()
        );
        for path in &emitted.paths {
            eprintln!("wrote {}", path.display());
        }
    }
    if table.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!(
            "{}",
            paint_error(&format!(
                "{} parameter point(s) failed; see {}",
                table.failures.len(),
                outdir.join("run_log.txt").display()
            ))
        );
        ExitCode::from(2)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Scan(args) => run_command(args, Mode::SpectrumScan),
        Command::Map(args) => run_command(args, Mode::ParameterMap),
    }
}
