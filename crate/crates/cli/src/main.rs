//! `qszilard` — cycles of a single-molecule Szilard engine run by a
//! finite-temperature two-level demon. Subcommands report one cycle's
//! work/heat ledger, solve for operating points, emit figure data, and
//! sweep cycles over parameter grids.

mod config;
mod figures;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qszilard::analysis::{critical_insertion, max_work_insertion, pwc_beta_threshold};
use qszilard::{
    run_cycle, run_sweep, AnalysisError, CycleConfig, CycleError, CycleResult, ResolvedPoint,
    SolveReport, SweepError,
};

use config::{ConfigError, Settings};
use output::{fmt_float, point_row, Table, POINT_COLUMNS};

#[derive(Parser)]
#[command(name = "qszilard", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one cycle and print its per-step ledger and totals.
    Cycle(CycleArgs),
    /// Emit the data grid behind a named figure (fig2, fig3a, fig3b, fig4, fig5).
    Figure(FigureArgs),
    /// Solve for an operating point: pwc-beta, l-cri, or l-wmax.
    Solve(SolveArgs),
    /// Evaluate cycles over a Cartesian parameter grid and write CSV.
    Sweep(SweepArgs),
}

/// Point parameters, named after the physical symbols. `beta_D=inf` selects
/// the perfect-record limit.
#[derive(Args, Debug, Clone, Default)]
struct ParamFlags {
    /// Barrier insertion position (defaults to L/2).
    #[arg(long = "l", value_name = "X")]
    insertion: Option<f64>,
    /// Well length.
    #[arg(long = "L", value_name = "X")]
    box_length: Option<f64>,
    /// Engine bath inverse temperature.
    #[arg(long, value_name = "X")]
    beta: Option<f64>,
    /// Demon bath inverse temperature (accepts `inf`).
    #[arg(long = "beta_D", value_name = "X")]
    bath_beta: Option<f64>,
    /// Demon register gap.
    #[arg(long = "Delta", value_name = "X")]
    gap: Option<f64>,
    /// Demon register coherence magnitude.
    #[arg(long = "F", value_name = "X")]
    coherence: Option<f64>,
    /// Expansion endpoint for a ground record (defaults pin the wall at l).
    #[arg(long = "l_g", value_name = "X")]
    expand_ground: Option<f64>,
    /// Expansion endpoint for an excited record.
    #[arg(long = "l_e", value_name = "X")]
    expand_excited: Option<f64>,
    /// Series truncation tolerance.
    #[arg(long, value_name = "X")]
    tol: Option<f64>,
    /// Wall-guard fraction for defaulted sweep endpoints.
    #[arg(long = "guard-frac", value_name = "X")]
    guard_frac: Option<f64>,
    /// Plain-text key=value config file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CycleArgs {
    #[command(flatten)]
    params: ParamFlags,
    /// Also append the machine row to this CSV file.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FigureArgs {
    /// One of fig2, fig3a, fig3b, fig4, fig5.
    name: String,
    #[command(flatten)]
    params: ParamFlags,
    /// Output CSV path (defaults to <name>.csv).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// One of pwc-beta, l-cri, l-wmax.
    target: String,
    #[command(flatten)]
    params: ParamFlags,
    /// Lower bracket edge (give with --hi).
    #[arg(long, value_name = "X")]
    lo: Option<f64>,
    /// Upper bracket edge (give with --lo).
    #[arg(long, value_name = "X")]
    hi: Option<f64>,
    /// Also write the report as a one-row CSV file.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    params: ParamFlags,
    /// Grid axis NAME:MIN:MAX:COUNT[:lin|log]; repeat for more dimensions.
    #[arg(long = "axis", value_name = "SPEC")]
    axes: Vec<String>,
    /// Worker threads (0 = all cores, 1 = sequential).
    #[arg(long, value_name = "N")]
    workers: Option<usize>,
    /// Output CSV path.
    #[arg(long, value_name = "PATH", default_value = "sweep.csv")]
    out: PathBuf,
}

/// One failure, with the exit code the shell sees: 1 for configuration, 2
/// for domain errors, 3 for solver misses.
#[derive(Debug)]
enum Failure {
    Config(String),
    Domain(String),
    Solver(String),
}

impl Failure {
    fn report(self) -> ExitCode {
        let (code, message) = match self {
            Failure::Config(m) => (1, m),
            Failure::Domain(m) => (2, m),
            Failure::Solver(m) => (3, m),
        };
        eprintln!("error: {message}");
        ExitCode::from(code)
    }
}

impl From<ConfigError> for Failure {
    fn from(err: ConfigError) -> Self {
        Failure::Config(err.to_string())
    }
}

impl From<CycleError> for Failure {
    fn from(err: CycleError) -> Self {
        Failure::Domain(err.to_string())
    }
}

impl From<AnalysisError> for Failure {
    fn from(err: AnalysisError) -> Self {
        match err {
            AnalysisError::NoSignChange { .. } | AnalysisError::BoundaryMaximum { .. } => {
                Failure::Solver(err.to_string())
            }
            AnalysisError::InvalidBracket { .. } => Failure::Config(err.to_string()),
            AnalysisError::Cycle(inner) => Failure::Domain(inner.to_string()),
        }
    }
}

impl From<SweepError> for Failure {
    fn from(err: SweepError) -> Self {
        match err {
            SweepError::InvalidAxis { .. } => Failure::Config(err.to_string()),
            SweepError::ThreadPool(_) => Failure::Domain(err.to_string()),
        }
    }
}

fn save(table: &Table, path: &PathBuf) -> Result<(), Failure> {
    table
        .save(path)
        .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))
}

impl ParamFlags {
    fn settings(&self) -> Result<Settings, Failure> {
        let mut settings = Settings::from_env()?;
        if let Some(path) = &self.config {
            settings.load_file(path)?;
        }
        let p = &mut settings.params;
        if let Some(v) = self.insertion {
            p.insertion = Some(v);
        }
        if let Some(v) = self.box_length {
            p.box_length = v;
        }
        if let Some(v) = self.beta {
            p.system_beta = v;
        }
        if let Some(v) = self.bath_beta {
            p.bath_beta = v;
        }
        if let Some(v) = self.gap {
            p.gap = v;
        }
        if let Some(v) = self.coherence {
            p.coherence = v;
        }
        if let Some(v) = self.expand_ground {
            p.expand_ground = Some(v);
        }
        if let Some(v) = self.expand_excited {
            p.expand_excited = Some(v);
        }
        if let Some(v) = self.tol {
            p.tol = v;
        }
        if let Some(v) = self.guard_frac {
            p.guard_frac = v;
        }
        Ok(settings)
    }
}

/// A single operating point for `cycle` and `solve`: expansion endpoints
/// default to walls pinned at the insertion point, whose totals equal every
/// other admissible endpoint choice without near-wall rounding noise.
fn operating_point(settings: &Settings) -> Result<(ResolvedPoint, CycleConfig), Failure> {
    let p = &settings.params;
    let l = p.insertion.unwrap_or(0.5 * p.box_length);
    let (l_g, l_e) = match (p.expand_ground, p.expand_excited) {
        (None, None) => (l, l),
        (Some(g), Some(e)) => (g, e),
        _ => {
            return Err(Failure::Config(
                "config key `l_g`/`l_e`: give both expansion endpoints or neither".into(),
            ))
        }
    };
    let point = ResolvedPoint {
        insertion: l,
        box_length: p.box_length,
        system_beta: p.system_beta,
        gap: p.gap,
        bath_beta: p.bath_beta,
        coherence: p.coherence,
        expand_ground: l_g,
        expand_excited: l_e,
        tol: p.tol,
    };
    let cfg = point.config()?;
    Ok((point, cfg))
}

fn note_point(table: &mut Table, point: &ResolvedPoint) {
    table.note_float("l", point.insertion);
    table.note_float("L", point.box_length);
    table.note_float("beta", point.system_beta);
    table.note_float("beta_D", point.bath_beta);
    table.note_float("Delta", point.gap);
    table.note_float("F", point.coherence);
    table.note_float("l_g", point.expand_ground);
    table.note_float("l_e", point.expand_excited);
    table.note_float("tol", point.tol);
}

fn cmd_cycle(args: &CycleArgs) -> Result<(), Failure> {
    let settings = args.params.settings()?;
    let (point, cfg) = operating_point(&settings)?;
    let result = run_cycle(&cfg)?;
    print_ledger(&point, &result);
    if let Some(path) = &args.out {
        let mut table = Table::new("cycle", POINT_COLUMNS.to_vec());
        note_point(&mut table, &point);
        table.push_row(point_row(&point, &Ok(result)));
        save(&table, path)?;
    }
    Ok(())
}

fn print_ledger(point: &ResolvedPoint, result: &CycleResult) {
    println!(
        "operating point: l = {}, L = {}, beta = {}, beta_D = {}, Delta = {}, F = {}",
        fmt_float(point.insertion),
        fmt_float(point.box_length),
        fmt_float(point.system_beta),
        fmt_float(point.bath_beta),
        fmt_float(point.gap),
        fmt_float(point.coherence),
    );
    println!(
        "expansion endpoints: l_g = {}, l_e = {}",
        fmt_float(point.expand_ground),
        fmt_float(point.expand_excited),
    );
    println!();
    println!(
        "{:<12} {:>24} {:>24} {:>24} {:>24}",
        "step", "W", "Q", "dU", "dS"
    );
    for step in &result.steps {
        println!(
            "{:<12} {:>24} {:>24} {:>24} {:>24}",
            step.name.label(),
            fmt_float(step.work),
            fmt_float(step.heat),
            fmt_float(step.d_energy),
            fmt_float(step.d_entropy),
        );
    }
    println!();
    println!("W_tot      = {}", fmt_float(result.w_tot));
    println!("Q_tot      = {}", fmt_float(result.q_tot));
    println!("eta        = {}", fmt_float(result.eta));
    println!("eta_carnot = {}", fmt_float(result.eta_carnot));
    println!("pwc        = {}", result.pwc_satisfied);
    println!(
        "P_L, P_R   = {}, {}",
        fmt_float(result.p_left),
        fmt_float(result.p_right)
    );
    println!(
        "p_g, p_e   = {}, {}",
        fmt_float(result.populations.0),
        fmt_float(result.populations.1)
    );
    println!(
        "w_g, w_e   = {}, {}",
        fmt_float(result.demon_marginal.0),
        fmt_float(result.demon_marginal.1)
    );
    println!("S_erasure  = {}", fmt_float(result.erasure_entropy));
}

fn cmd_figure(args: &FigureArgs) -> Result<(), Failure> {
    if !figures::NAMES.contains(&args.name.as_str()) {
        return Err(Failure::Config(format!(
            "unknown figure `{}`; expected one of {}",
            args.name,
            figures::NAMES.join(", ")
        )));
    }
    let settings = args.params.settings()?;
    let table = figures::build(&args.name, &settings.params)?;
    let path = args
        .out
        .clone()
        .or(settings.out)
        .unwrap_or_else(|| PathBuf::from(figures::default_filename(&args.name)));
    save(&table, &path)?;
    println!("wrote {} rows to {}", table.rows.len(), path.display());
    Ok(())
}

fn cmd_solve(args: &SolveArgs) -> Result<(), Failure> {
    let settings = args.params.settings()?;
    let (point, cfg) = operating_point(&settings)?;
    let bracket = match (args.lo, args.hi) {
        (None, None) => None,
        (Some(lo), Some(hi)) => Some((lo, hi)),
        _ => {
            return Err(Failure::Config(
                "config key `lo`/`hi`: give both bracket edges or neither".into(),
            ))
        }
    };
    let report = match args.target.as_str() {
        "pwc-beta" => pwc_beta_threshold(&cfg, bracket)?,
        "l-cri" => critical_insertion(&cfg, bracket)?,
        "l-wmax" => max_work_insertion(&cfg, bracket)?,
        other => {
            return Err(Failure::Config(format!(
                "unknown solve target `{other}`; expected pwc-beta, l-cri, or l-wmax"
            )))
        }
    };
    print_report(&report);
    if let Some(path) = &args.out {
        let mut table = Table::new(
            "solve",
            vec![
                "target",
                "root",
                "residual",
                "bracket_lo",
                "bracket_hi",
                "iterations",
                "condition_root",
                "condition_residual",
            ],
        );
        note_point(&mut table, &point);
        table.push_row(vec![
            report.target.label().to_string(),
            fmt_float(report.root),
            fmt_float(report.residual),
            fmt_float(report.bracket.0),
            fmt_float(report.bracket.1),
            report.iterations.to_string(),
            fmt_float(report.condition_root.unwrap_or(f64::NAN)),
            fmt_float(report.condition_residual.unwrap_or(f64::NAN)),
        ]);
        save(&table, path)?;
    }
    Ok(())
}

fn print_report(report: &SolveReport) {
    println!("target     = {}", report.target.label());
    println!("root       = {}", fmt_float(report.root));
    println!("residual   = {}", fmt_float(report.residual));
    println!(
        "bracket    = [{}, {}]",
        fmt_float(report.bracket.0),
        fmt_float(report.bracket.1)
    );
    println!("iterations = {}", report.iterations);
    if let Some(root) = report.condition_root {
        println!("condition_root     = {}", fmt_float(root));
    }
    if let Some(residual) = report.condition_residual {
        println!("condition_residual = {}", fmt_float(residual));
    }
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Failure> {
    let mut settings = args.params.settings()?;
    if !args.axes.is_empty() {
        settings.axes = args
            .axes
            .iter()
            .map(|spec| config::parse_axis(spec))
            .collect::<Result<_, _>>()?;
    }
    if settings.axes.is_empty() {
        return Err(Failure::Config(
            "config key `axis`: at least one sweep axis is required".into(),
        ));
    }
    let workers = args.workers.or(settings.workers).unwrap_or(0);
    let outcomes = run_sweep(&settings.params, &settings.axes, workers)?;

    let mut table = Table::new("sweep", POINT_COLUMNS.to_vec());
    let p = &settings.params;
    table.note_float("L", p.box_length);
    table.note_float("beta", p.system_beta);
    table.note_float("beta_D", p.bath_beta);
    table.note_float("Delta", p.gap);
    table.note_float("F", p.coherence);
    table.note_float("l", p.insertion.unwrap_or(0.5 * p.box_length));
    if let (Some(g), Some(e)) = (p.expand_ground, p.expand_excited) {
        table.note_float("l_g", g);
        table.note_float("l_e", e);
    }
    table.note_float("guard_frac", p.guard_frac);
    table.note_float("tol", p.tol);
    for axis in &settings.axes {
        table.note_axis(axis);
    }
    for outcome in &outcomes {
        table.push_row(point_row(&outcome.point, &outcome.result));
    }
    save(&table, &args.out)?;
    println!("wrote {} rows to {}", table.rows.len(), args.out.display());
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Cycle(args) => cmd_cycle(args),
        Command::Figure(args) => cmd_figure(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Sweep(args) => cmd_sweep(args),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => failure.report(),
    }
}
