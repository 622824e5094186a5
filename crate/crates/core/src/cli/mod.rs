//! Command-line front end: single runs and truth-table sweeps.
//!
//! Exit codes: 0 success, 1 solver or I/O failure, 2 invalid configuration,
//! 3 truth-table mismatch.

pub mod config;
pub mod export;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use config::{ConfigFile, RunConfig};
pub use export::SnapshotFormat;

use crate::error::{Error, Result};
use crate::gates::{run_row, truth_table, BcKind, GateKind, RowOutcome, TruthTable};
use crate::optimizer::RunTrace;

pub const EXIT_OK: i32 = 0;
pub const EXIT_SOLVER: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

pub const MANIFEST_FILE: &str = "manifest.toml";
pub const CONVERGENCE_FILE: &str = "convergence.csv";
pub const TABLE_FILE: &str = "truth_table.csv";

#[derive(Debug, Parser)]
#[command(name = "heat-logic", version, about = "Grow logic gates by heat-conduction topology optimisation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimise one input pair and export snapshots, log and manifest.
    Run(RunArgs),
    /// Optimise all four input pairs and check the gate's truth table.
    TruthTable(CommonArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_parser = ["0", "1"])]
    x: Option<String>,
    #[arg(long, value_parser = ["0", "1"])]
    y: Option<String>,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// and | xor | half-adder
    #[arg(long)]
    gate: Option<String>,
    /// dirichlet | neumann
    #[arg(long)]
    bc: Option<String>,
    /// Iteration cap.
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    theta: Option<f64>,
    /// Target material mass M.
    #[arg(long)]
    mass: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    snapshot_stride: Option<usize>,
    /// pgm | csv | both
    #[arg(long)]
    format: Option<String>,
    /// TOML config with [gate], [optimizer] and [output] sections.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Optimizer override, e.g. --set rho_min=0.02 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl CommonArgs {
    fn to_file(&self, bits: Option<(&Option<String>, &Option<String>)>) -> Result<ConfigFile> {
        let mut file = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let mut flags = ConfigFile::default();
        flags.gate.kind = self.gate.as_deref().map(str::parse::<GateKind>).transpose()?;
        flags.gate.bc = self.bc.as_deref().map(str::parse::<BcKind>).transpose()?;
        if let Some((x, y)) = bits {
            flags.gate.x = x.as_deref().map(|v| (v == "1") as u8);
            flags.gate.y = y.as_deref().map(|v| (v == "1") as u8);
        }
        flags.optimizer.max_iters = self.iters;
        flags.optimizer.theta = self.theta;
        flags.optimizer.mass = self.mass;
        flags.optimizer.snapshot_stride = self.snapshot_stride;
        flags.output.dir = self.out.clone();
        flags.output.format = self.format.as_deref().map(str::parse).transpose()?;
        file = file.merge(flags);
        for assignment in &self.overrides {
            file.set(assignment)?;
        }
        Ok(file)
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::InvalidSpec(_) | Error::InvalidArgument(_) => EXIT_CONFIG,
        _ => EXIT_SOLVER,
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Manifest text: the resolved configuration plus a `[result]` table.
pub fn manifest(config: &RunConfig, outcome: &RowOutcome) -> String {
    let mut file = config.to_file();
    let trace = &outcome.trace;
    let mut result = toml::Table::new();
    result.insert("termination".into(), trace.termination.to_string().into());
    result.insert("iterations".into(), (trace.iterations() as i64).into());
    result.insert("threshold".into(), outcome.readout.threshold.into());
    let mut bits = toml::Table::new();
    let mut densities = toml::Table::new();
    for o in &outcome.readout.outputs {
        bits.insert(o.name.clone(), (o.value as i64).into());
        densities.insert(o.name.clone(), o.density.into());
    }
    result.insert("outputs".into(), bits.into());
    result.insert("density".into(), densities.into());
    file.result = Some(result);
    toml::to_string(&file).expect("manifest serialises")
}

/// Write snapshots, convergence log and manifest for one run into `dir`.
pub fn write_artifacts(dir: &Path, config: &RunConfig, outcome: &RowOutcome) -> Result<()> {
    create_dir(dir)?;
    let bounds = (config.params.rho_min, config.params.rho_max);
    let trace: &RunTrace = &outcome.trace;
    for snap in &trace.snapshots {
        export::export_snapshot(
            dir,
            snap.iteration,
            &snap.densities,
            config.spec.nx,
            config.spec.ny,
            bounds,
            config.format,
        )?;
    }
    write(&dir.join(CONVERGENCE_FILE), export::convergence_csv(&trace.records))?;
    write(&dir.join(MANIFEST_FILE), manifest(config, outcome))
}

#[derive(Debug)]
pub struct RunReport {
    pub outcome: RowOutcome,
    pub out_dir: PathBuf,
}

pub fn cmd_run(config: &RunConfig) -> Result<RunReport> {
    let outcome = run_row(&config.spec, &config.params, config.x, config.y)?;
    write_artifacts(&config.out_dir, config, &outcome)?;
    Ok(RunReport {
        outcome,
        out_dir: config.out_dir.clone(),
    })
}

pub fn row_dir(out: &Path, x: bool, y: bool) -> PathBuf {
    out.join(format!("row_x{}_y{}", x as u8, y as u8))
}

/// CSV of the observed table: inputs, bits, densities and iterations.
pub fn table_csv(config: &RunConfig, table: &TruthTable) -> String {
    let names: Vec<&str> = config.spec.outputs().map(|s| s.name.as_str()).collect();
    let mut out = String::from("x,y");
    for n in &names {
        write!(out, ",{n}").unwrap();
    }
    for n in &names {
        write!(out, ",rho_{n}").unwrap();
    }
    out.push_str(",iterations\n");
    for row in &table.rows {
        write!(out, "{},{}", row.x as u8, row.y as u8).unwrap();
        match &row.outcome {
            Ok(o) => {
                for r in &o.readout.outputs {
                    write!(out, ",{}", r.value as u8).unwrap();
                }
                for r in &o.readout.outputs {
                    write!(out, ",{:?}", r.density).unwrap();
                }
                writeln!(out, ",{}", o.trace.iterations()).unwrap();
            }
            Err(_) => {
                for _ in 0..2 * names.len() {
                    out.push_str(",error");
                }
                out.push_str(",\n");
            }
        }
    }
    out
}

/// Run the sweep, write per-row artifacts and the table. Returns the exit
/// status: 0 on a matching table, 3 on mismatch, 1 if any row failed.
pub fn cmd_truth_table(config: &RunConfig) -> Result<(TruthTable, i32)> {
    let table = truth_table(&config.spec, &config.params);
    create_dir(&config.out_dir)?;
    let mut status = EXIT_OK;
    for row in &table.rows {
        match &row.outcome {
            Ok(outcome) => {
                let row_config = RunConfig {
                    x: row.x,
                    y: row.y,
                    out_dir: row_dir(&config.out_dir, row.x, row.y),
                    ..config.clone()
                };
                write_artifacts(&row_config.out_dir, &row_config, outcome)?;
            }
            Err(e) => {
                eprintln!("row x={} y={}: {e}", row.x as u8, row.y as u8);
                status = EXIT_SOLVER;
            }
        }
    }
    let csv = table_csv(config, &table);
    write(&config.out_dir.join(TABLE_FILE), &csv)?;
    print!("{csv}");
    if status == EXIT_OK && !table.matches(&config.spec) {
        status = EXIT_MISMATCH;
    }
    Ok((table, status))
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Run(args) => {
            let file = args.common.to_file(Some((&args.x, &args.y)))?;
            let config = RunConfig::resolve(&file)?;
            let report = cmd_run(&config)?;
            let trace = &report.outcome.trace;
            println!(
                "{} after {} iterations",
                trace.termination,
                trace.iterations()
            );
            for o in &report.outcome.readout.outputs {
                println!("{}={} (rho={:.4})", o.name, o.value as u8, o.density);
            }
            println!("artifacts in {}", report.out_dir.display());
            Ok(EXIT_OK)
        }
        Command::TruthTable(args) => {
            let config = RunConfig::resolve(&args.to_file(None)?)?;
            let (_, status) = cmd_truth_table(&config)?;
            if status == EXIT_MISMATCH {
                eprintln!("observed table does not match the {} gate", config.spec.kind.name());
            }
            Ok(status)
        }
    }
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
