//! Command-line front end. Exit codes: 0 success, 1 validation or numerical
//! failure, 2 usage or configuration error.

mod validate;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::engine::{summarize, Engine, EngineParams, Trajectory};
use crate::measurement::{kraus_pair, measure_ground_state, KrausFamily};
use crate::scenarios::{scenario_by_name, Overrides, PhysicalScenario};
use crate::sweep::{grid_scan_with_limit, optimize_all, ScanTable};
use crate::{Error, Result};

pub use validate::{run_validation, Check, Fault, ValidationReport};

/// Efficiency-optimal `epsilon` of the gradual limit, used as a default.
pub const DEFAULT_EPSILON: f64 = 1.100_389;

#[derive(Debug, Parser)]
#[command(name = "qme", version, about = "Measurement-fuelled single-particle engine in a linear potential")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate p_o, work, heat and efficiency over an (epsilon, w) grid.
    Scan(ScanArgs),
    /// Locate the optimal operating points.
    Optimize(OptimizeArgs),
    /// Monte Carlo run of the feedback cycle.
    Simulate(SimulateArgs),
    /// Physical-unit numbers for a named realization.
    Scenario(ScenarioArgs),
    /// Run the invariant suite.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Sine,
    Hard,
    Smooth,
}

impl From<FamilyArg> for KrausFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Sine => KrausFamily::SineRamp,
            FamilyArg::Hard => KrausFamily::HardWindow,
            FamilyArg::Smooth => KrausFamily::SmoothC2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatrixColumn {
    #[value(name = "p_o")]
    PO,
    Work,
    Heat,
    Efficiency,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 0.05)]
    pub eps_min: f64,
    #[arg(long, default_value_t = 3.0)]
    pub eps_max: f64,
    #[arg(long, default_value_t = 60)]
    pub n_eps: usize,
    #[arg(long, default_value_t = 0.05)]
    pub w_min: f64,
    #[arg(long, default_value_t = 20.0)]
    pub w_max: f64,
    #[arg(long, default_value_t = 60)]
    pub n_w: usize,
    #[arg(long, value_enum, default_value_t = FamilyArg::Sine)]
    pub family: FamilyArg,
    /// Append a w = inf column from the gradual limit.
    #[arg(long)]
    pub gradual_limit: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write a gnuplot nonuniform matrix of one column instead of a table.
    #[arg(long, value_enum)]
    pub matrix: Option<MatrixColumn>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 5.0)]
    pub w: f64,
    #[arg(long, value_enum, default_value_t = FamilyArg::Sine)]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 10_000)]
    pub n_cycles: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Cycle duration after outcome i (default: epsilon).
    #[arg(long)]
    pub tau_i: Option<f64>,
    /// Cycle duration after outcome o (default: epsilon).
    #[arg(long)]
    pub tau_o: Option<f64>,
    /// Demon memory temperature in tilde units.
    #[arg(long, default_value_t = 0.0)]
    pub t_demon: f64,
    /// Per-cycle CSV destination.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Summary JSON destination (stdout when absent).
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// rb_elevator, neutron_mirror or electron_battery.
    pub name: String,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 5.0)]
    pub w: f64,
    #[arg(long, value_enum, default_value_t = FamilyArg::Sine)]
    pub family: FamilyArg,
    /// kg
    #[arg(long)]
    pub mass: Option<f64>,
    /// m/s^2 for gravity, V/m for the battery.
    #[arg(long)]
    pub field: Option<f64>,
    /// V
    #[arg(long)]
    pub voltage: Option<f64>,
    /// m
    #[arg(long)]
    pub gap: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, hide = true)]
    pub inject_fault: Option<FaultArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaultArg {
    Completeness,
}

/// Fifteen significant digits in scientific notation.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.14e}")
}

pub fn write_scan_csv(table: &ScanTable, out: &mut (impl Write + ?Sized)) -> io::Result<()> {
    writeln!(out, "epsilon,w,p_o,work,heat,efficiency")?;
    for r in &table.rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_num(r.epsilon),
            fmt_num(r.w),
            fmt_num(r.p_o),
            fmt_num(r.work),
            fmt_num(r.heat),
            fmt_num(r.efficiency)
        )?;
    }
    Ok(())
}

/// gnuplot `nonuniform matrix` layout: first row `n_w w_1 .. w_n`, then
/// one row per epsilon starting with that epsilon.
pub fn write_scan_matrix(table: &ScanTable, column: MatrixColumn, out: &mut (impl Write + ?Sized)) -> io::Result<()> {
    let pick = |r: &crate::sweep::ScanRow| match column {
        MatrixColumn::PO => r.p_o,
        MatrixColumn::Work => r.work,
        MatrixColumn::Heat => r.heat,
        MatrixColumn::Efficiency => r.efficiency,
    };
    let mut header = vec![table.w_values.len().to_string()];
    header.extend(table.w_values.iter().map(|&w| fmt_num(w)));
    writeln!(out, "{}", header.join(" "))?;
    for (i, &eps) in table.eps_values.iter().enumerate() {
        let mut line = vec![fmt_num(eps)];
        line.extend((0..table.w_values.len()).map(|j| fmt_num(pick(table.row(i, j)))));
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn write_trajectory_csv(t: &Trajectory, out: &mut (impl Write + ?Sized)) -> io::Result<()> {
    writeln!(out, "cycle,outcome,wall,work,heat_drawn,heat_dumped")?;
    for r in &t.records {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.index,
            r.outcome.label(),
            fmt_num(r.wall_after),
            fmt_num(r.work),
            fmt_num(r.quantum_heat_drawn),
            fmt_num(r.heat_dumped)
        )?;
    }
    Ok(())
}

fn open_output(path: Option<&Path>, stdout: &mut dyn Write, body: &dyn Fn(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    let res = match path {
        Some(p) => File::create(p).and_then(|f| {
            let mut w = BufWriter::new(f);
            body(&mut w)?;
            w.flush()
        }),
        None => body(stdout),
    };
    match res {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        other => other.map_err(|e| Error::Config(format!("cannot write output: {e}"))),
    }
}

fn write_json(path: Option<&Path>, stdout: &mut dyn Write, value: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Config(e.to_string()))?;
    open_output(path, stdout, &|w| writeln!(w, "{text}"))
}

fn cmd_scan(a: &ScanArgs, stdout: &mut dyn Write) -> Result<i32> {
    let table = grid_scan_with_limit(
        (a.eps_min, a.eps_max),
        (a.w_min, a.w_max),
        a.n_eps,
        a.n_w,
        a.family.into(),
        a.gradual_limit,
    )?;
    for r in table.failures() {
        eprintln!("warning: ({}, {}) not evaluated: {}", r.epsilon, r.w, r.error.as_deref().unwrap_or(""));
    }
    let path = a.out.as_deref();
    match (a.matrix, a.format) {
        (Some(column), _) => open_output(path, stdout, &|w| write_scan_matrix(&table, column, w))?,
        (None, Format::Csv) => open_output(path, stdout, &|w| write_scan_csv(&table, w))?,
        (None, Format::Json) => {
            let value = serde_json::to_value(&table).map_err(|e| Error::Config(e.to_string()))?;
            write_json(path, stdout, &value)?
        }
    }
    Ok(0)
}

fn cmd_optimize(a: &OptimizeArgs, stdout: &mut dyn Write) -> Result<i32> {
    let optima = optimize_all()?;
    let value = serde_json::to_value(&optima).map_err(|e| Error::Config(e.to_string()))?;
    write_json(a.out.as_deref(), stdout, &value)?;
    Ok(0)
}

fn cmd_simulate(a: &SimulateArgs, stdout: &mut dyn Write) -> Result<i32> {
    let mut params = EngineParams::new(a.epsilon, a.w, a.family.into()).with_demon_temperature(a.t_demon);
    params = params.with_durations(a.tau_i.unwrap_or(params.tau_i), a.tau_o.unwrap_or(params.tau_o));
    let engine = Engine::new(params)?;
    let t = engine.run_stream(a.n_cycles, a.seed, 0)?;
    if let Some(path) = &a.out {
        open_output(Some(path), stdout, &|w| write_trajectory_csv(&t, w))?;
    }
    let summary = summarize(&engine, &t);
    let value = json!({ "params": params, "summary": summary });
    write_json(a.summary.as_deref(), stdout, &value)?;
    Ok(0)
}

const EV: f64 = crate::scenarios::constants::E_CHARGE;

pub fn scenario_json(s: &PhysicalScenario, epsilon: f64, w: f64, family: KrausFamily) -> Result<serde_json::Value> {
    let report = measure_ground_state(&kraus_pair(family, epsilon, w)?)?;
    Ok(json!({
        "scenario": s.kind.name(),
        "mass_kg": s.mass,
        "force_N": s.force,
        "x0_m": s.x0,
        "energy_scale_J": s.energy_scale,
        "t_star_K": s.t_star,
        "epsilon": epsilon,
        "w": w,
        "family": family.tag(),
        "p_o": report.p_o,
        "work_per_cycle_eV": s.to_joules(report.work) / EV,
        "work_per_success_eV": s.work_per_success(epsilon) / EV,
        "gap_m": s.gap,
        "voltage_V": s.voltage,
        "stored_energy_eV": s.stored_energy().map(|e| e / EV),
    }))
}

fn cmd_scenario(a: &ScenarioArgs, stdout: &mut dyn Write) -> Result<i32> {
    let overrides = Overrides { mass: a.mass, field: a.field, voltage: a.voltage, gap: a.gap };
    let s = scenario_by_name(&a.name, overrides)?;
    let value = scenario_json(&s, a.epsilon, a.w, a.family.into())?;
    write_json(a.out.as_deref(), stdout, &value)?;
    Ok(0)
}

fn cmd_validate(a: &ValidateArgs, stdout: &mut dyn Write) -> Result<i32> {
    let fault = a.inject_fault.map(|FaultArg::Completeness| Fault::Completeness);
    let report = run_validation(fault)?;
    open_output(a.out.as_deref(), stdout, &|w| write!(w, "{report}"))?;
    Ok(if report.all_passed() { 0 } else { 1 })
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Domain(_) | Error::Contract(_) => 2,
        _ => 1,
    }
}

/// Parses `args` (including the program name) and runs the command,
/// writing results to `stdout` unless an output path is given.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { write!(stdout, "{rendered}") } else { write!(stderr, "{rendered}") };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Scan(a) => cmd_scan(a, stdout),
        Command::Optimize(a) => cmd_optimize(a, stdout),
        Command::Simulate(a) => cmd_simulate(a, stdout),
        Command::Scenario(a) => cmd_scenario(a, stdout),
        Command::Validate(a) => cmd_validate(a, stdout),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
