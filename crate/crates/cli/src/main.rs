//! `becpert` command-line driver.
//!
//! Exit codes: 0 success, 1 runtime or convergence failure, 2 bad
//! configuration or usage.

mod config;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use becpert::analysis::AnalysisReport;
use becpert::error::Error;
use becpert::grids::{AxialGrid, RadialGrid};
use becpert::pipeline::{solve_point, PointSolution};
use becpert::solvers::{solve_gp1d, solve_gp3d, solve_quintic, GroundState1D, GroundState3D};

use config::{Format, RunConfig};
use output::{RunManifest, TaskStatus, Writer};
use run::{Outcome, Plan, Task};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "becpert",
    version,
    about = "Ground states and Schmidt-mode entanglement of cigar-shaped condensates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long, global = true, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in configuration (rb87-q2, rb87-family).
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Atom numbers, comma separated or repeated.
    #[arg(long = "N", global = true, value_delimiter = ',')]
    atoms: Vec<f64>,
    /// Longitudinal trap powers, comma separated or repeated.
    #[arg(long, global = true, value_delimiter = ',')]
    q: Vec<u32>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Multiplies both grid node counts.
    #[arg(long = "grid-scale", global = true)]
    grid_scale: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Ground state of one equation for every (q, N).
    Solve { model: SolveModel },
    /// Full pipeline and comparison report for every (q, N).
    Analyze,
    /// Table and figure data for the Rb87 family.
    Reproduce { target: Target },
    /// Every output for every (q, N), with a manifest.
    Sweep,
    /// Print the resolved configuration.
    Config,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SolveModel {
    Gp1d,
    Quintic,
    Gp3d,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Target {
    Table1,
    Fig1,
    Fig2,
    Fig3,
    Fig6,
    Fig7,
    All,
}

fn resolve(common: &Common, default_preset: &str) -> Result<RunConfig, CliError> {
    let mut cfg = match (&common.config, &common.preset) {
        (Some(path), _) => RunConfig::load(path)?,
        (None, Some(p)) => RunConfig::preset(p)?,
        (None, None) => RunConfig::preset(default_preset)?,
    };
    if !common.atoms.is_empty() {
        cfg.sweep.atoms = common.atoms.clone();
    }
    if !common.q.is_empty() {
        cfg.trap.q = common.q.clone();
    }
    if let Some(dir) = &common.out {
        cfg.output.dir = dir.clone();
    }
    if let Some(f) = common.grid_scale {
        cfg.grid = cfg
            .grid
            .scaled(f)
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn status<T>(o: &Outcome<T>) -> TaskStatus {
    TaskStatus {
        q: o.task.q,
        atoms: o.task.condensate.atoms,
        status: if o.result.is_ok() { "ok" } else { "failed" },
        error: o.result.as_ref().err().map(|e| e.to_string()),
        seconds: o.seconds,
    }
}

fn finish_manifest(
    w: &mut Writer,
    command: &str,
    cfg: &RunConfig,
    plan: &Plan,
    tasks: Vec<TaskStatus>,
    start: Instant,
) -> Result<(), CliError> {
    let failed = tasks.iter().filter(|t| t.status != "ok").count();
    let manifest = RunManifest {
        command: command.into(),
        config_hash: cfg.hash(),
        files: w.names(),
        tasks,
        critical: plan.critical.clone(),
        total_seconds: start.elapsed().as_secs_f64(),
    };
    w.json("manifest.json", &manifest)?;
    if failed > 0 {
        return Err(CliError::Runtime(format!(
            "{failed} task(s) failed, see manifest.json"
        )));
    }
    Ok(())
}

fn report_failures<T>(outcomes: &[Outcome<T>]) {
    for o in outcomes {
        if let Err(e) = &o.result {
            eprintln!(
                "q = {}, N = {}: {e}",
                o.task.q,
                output::atoms_label(o.task.condensate.atoms)
            );
        }
    }
}

#[derive(Serialize)]
struct SolveSummary {
    model: SolveModel,
    q: u32,
    #[serde(rename = "N")]
    atoms: f64,
    /// Units of hbar omega_T; the 1D models exclude the transverse zero point.
    mu: f64,
    mu_hz: f64,
    residual: f64,
    iterations: usize,
    energy: f64,
    axial_grid: AxialGrid,
    #[serde(skip_serializing_if = "Option::is_none")]
    radial_grid: Option<RadialGrid>,
}

enum State {
    Line(GroundState1D),
    Full(GroundState3D),
}

fn solve_one(cfg: &RunConfig, model: SolveModel, t: &Task) -> Result<State, Error> {
    let grid = cfg.grid.cylindrical(&t.condensate)?;
    let s = &cfg.solver;
    Ok(match model {
        SolveModel::Gp1d => State::Line(solve_gp1d(&t.condensate, &grid.axial, s)?),
        SolveModel::Quintic => State::Line(solve_quintic(&t.condensate, &grid.axial, s)?),
        SolveModel::Gp3d => State::Full(solve_gp3d(&t.condensate, &grid, s)?),
    })
}

fn cmd_solve(cfg: &RunConfig, model: SolveModel) -> Result<(), CliError> {
    let start = Instant::now();
    let plan = run::plan(cfg)?;
    let tasks = plan.tasks()?;
    let outcomes = run::run_all(&tasks, |t| solve_one(cfg, model, t))?;
    report_failures(&outcomes);
    let statuses = outcomes.iter().map(status).collect();
    let mut w = Writer::new(&cfg.output.dir);
    let name = serde_json::to_value(model)
        .unwrap()
        .as_str()
        .unwrap_or("state")
        .to_owned();
    if outcomes.iter().all(|o| o.result.is_ok()) {
        let mut summaries = Vec::new();
        let written: Result<(), CliError> = (|| {
            for o in &outcomes {
                let t = &o.task;
                let stem = format!(
                    "{name}_q{}_N{}",
                    t.q,
                    output::atoms_label(t.condensate.atoms)
                );
                let (summary, binary, mut csv) = match o.result.as_ref().unwrap() {
                    State::Line(g) => {
                        let mut csv = Vec::new();
                        g.phi
                            .write_csv(&mut csv)
                            .map_err(|e| CliError::Runtime(e.to_string()))?;
                        let s = SolveSummary {
                            model,
                            q: t.q,
                            atoms: t.condensate.atoms,
                            mu: g.mu,
                            mu_hz: g.mu * cfg.trap.nu_t,
                            residual: g.residual,
                            iterations: g.iterations,
                            energy: g.energy(),
                            axial_grid: g.phi.grid,
                            radial_grid: None,
                        };
                        (s, g.phi.to_binary(), csv)
                    }
                    State::Full(g) => {
                        let mut csv = Vec::new();
                        g.psi
                            .write_csv(&mut csv)
                            .map_err(|e| CliError::Runtime(e.to_string()))?;
                        let s = SolveSummary {
                            model,
                            q: t.q,
                            atoms: t.condensate.atoms,
                            mu: g.mu,
                            mu_hz: g.mu * cfg.trap.nu_t,
                            residual: g.residual,
                            iterations: g.iterations,
                            energy: g.energy(),
                            axial_grid: g.psi.grid.axial,
                            radial_grid: Some(g.psi.grid.radial),
                        };
                        (s, g.psi.to_binary(), csv)
                    }
                };
                println!(
                    "{name} q = {} N = {}: mu = {:.10} hbar omega_T ({:.6} Hz), residual {:.1e}",
                    t.q,
                    output::atoms_label(t.condensate.atoms),
                    summary.mu,
                    summary.mu_hz,
                    summary.residual
                );
                if cfg.output.wants(Format::Binary) {
                    w.write(&format!("{stem}.becf"), &binary)?;
                }
                if cfg.output.wants(Format::Csv) {
                    w.write(&format!("{stem}.csv"), &std::mem::take(&mut csv))?;
                }
                summaries.push(summary);
            }
            w.json(&format!("{name}_summary.json"), &summaries)
        })();
        if let Err(e) = written {
            w.remove_all();
            return Err(e);
        }
    }
    finish_manifest(
        &mut w,
        &format!("solve {name}"),
        cfg,
        &plan,
        statuses,
        start,
    )
}

fn solve_points(cfg: &RunConfig) -> Result<(Plan, Vec<Outcome<PointSolution>>), CliError> {
    let plan = run::plan(cfg)?;
    if let Some(c) = &plan.critical {
        eprintln!("critical atom number {:.1}", c.atoms);
        for m in &c.matches {
            eprintln!(
                "  q = {:>2}: z0 = {:.4}, aspect ratio 1:{:.2}",
                m.q, m.z0, m.aspect_ratio
            );
        }
    }
    let tasks = plan.tasks()?;
    let outcomes = run::run_all(&tasks, |t| {
        solve_point(&t.condensate, &cfg.grid, &cfg.solver)
    })?;
    report_failures(&outcomes);
    Ok((plan, outcomes))
}

fn write_point(w: &mut Writer, cfg: &RunConfig, p: &PointSolution) -> Result<(), CliError> {
    let r = &p.report;
    if cfg.output.wants(Format::Json) {
        w.json(&output::report_name(r.q, r.atoms), r)?;
    }
    if cfg.output.wants(Format::Csv) {
        w.write(
            &output::profiles_name(r.q, r.atoms),
            output::density_profiles(p).as_bytes(),
        )?;
    }
    Ok(())
}

fn ok_points(outcomes: &[Outcome<PointSolution>]) -> Vec<&PointSolution> {
    outcomes
        .iter()
        .filter_map(|o| o.result.as_ref().ok())
        .collect()
}

fn cmd_analyze(cfg: &RunConfig, command: &str) -> Result<(), CliError> {
    let start = Instant::now();
    let (plan, outcomes) = solve_points(cfg)?;
    let mut w = Writer::new(&cfg.output.dir);
    for p in ok_points(&outcomes) {
        write_point(&mut w, cfg, p)?;
        let r = &p.report;
        println!(
            "q = {:>2} N = {:>6}: P_D = {:.4e}, C~ = {:.4}, mu_3d = {:.8}",
            r.q,
            output::atoms_label(r.atoms),
            r.p_d,
            r.c_exact,
            r.mu_3d
        );
    }
    if command == "sweep" {
        let reports: Vec<&AnalysisReport> =
            ok_points(&outcomes).iter().map(|p| &p.report).collect();
        write_tables(&mut w, &reports, Target::All)?;
    }
    let statuses = outcomes.iter().map(status).collect();
    finish_manifest(&mut w, command, cfg, &plan, statuses, start)
}

fn write_tables(
    w: &mut Writer,
    reports: &[&AnalysisReport],
    target: Target,
) -> Result<(), CliError> {
    let all = target == Target::All;
    if all || target == Target::Table1 {
        let t = output::table1(reports);
        w.write("table1.csv", t.csv.as_bytes())?;
        print!("{}", t.summary);
        if t.failures > 0 {
            println!("{} cell(s) outside the reference tolerance", t.failures);
        }
    }
    if all || target == Target::Fig2 {
        w.write("mu_vs_N.csv", output::mu_vs_n(reports).as_bytes())?;
    }
    if all || target == Target::Fig6 {
        w.write("concurrence.csv", output::concurrence(reports).as_bytes())?;
    }
    if all || target == Target::Fig7 {
        w.write(
            "average_density.csv",
            output::average_density(reports).as_bytes(),
        )?;
    }
    Ok(())
}

fn cmd_reproduce(cfg: &RunConfig, target: Target) -> Result<(), CliError> {
    let start = Instant::now();
    let (plan, outcomes) = solve_points(cfg)?;
    let mut w = Writer::new(&cfg.output.dir);
    let points = ok_points(&outcomes);
    if matches!(target, Target::Fig1 | Target::Fig3 | Target::All) {
        for p in &points {
            let r = &p.report;
            w.write(
                &output::profiles_name(r.q, r.atoms),
                output::density_profiles(p).as_bytes(),
            )?;
        }
    }
    let reports: Vec<&AnalysisReport> = points.iter().map(|p| &p.report).collect();
    write_tables(&mut w, &reports, target)?;
    let statuses = outcomes.iter().map(status).collect();
    finish_manifest(&mut w, "reproduce", cfg, &plan, statuses, start)
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Config => {
            print!("{}", resolve(&cli.common, "rb87-q2")?.to_toml());
            Ok(())
        }
        Command::Solve { model } => {
            let cfg = resolve(&cli.common, "rb87-q2")?;
            cfg.prepare_output()?;
            cmd_solve(&cfg, model)
        }
        Command::Analyze => {
            let cfg = resolve(&cli.common, "rb87-q2")?;
            cfg.prepare_output()?;
            cmd_analyze(&cfg, "analyze")
        }
        Command::Sweep => {
            let cfg = resolve(&cli.common, "rb87-q2")?;
            cfg.prepare_output()?;
            cmd_analyze(&cfg, "sweep")
        }
        Command::Reproduce { target } => {
            let cfg = resolve(&cli.common, "rb87-family")?;
            cfg.prepare_output()?;
            cmd_reproduce(&cfg, target)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
