//! The `ecoroute` command line.
//!
//! Every subcommand writes its artifacts under `--out` with fixed file names
//! and a `manifest.txt` recording the inputs that produced them.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ecoroute_core::{
    solve_with, split_demand, validate_network, DemandTable, Network, SolverConfig,
    TwoLinkScenario, VehicleClass,
};
use log::info;

use crate::experiments::heatmap::{run_heatmap, HeatmapMethod, HeatmapSpec, HEATMAP_SOLVER};
use crate::experiments::sweep::{
    default_epsilon, fraction_grid, run_fraction_sweep, FractionSweep, FractionSweepSpec,
};
use crate::experiments::table2::{run_table2, TABLE2_SOLVER};
use crate::report::{self, sig9};
use crate::svg;
use crate::tntp::{load_dataset, Dataset};
use crate::{Error, TntpError};

/// Environment variable holding the worker thread count (0 or unset: one
/// per core).
pub const WORKERS_ENV: &str = "ECOROUTE_WORKERS";

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const FAILURE: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const PARSE: u8 = 3;
    pub const VALIDATION: u8 = 4;
    pub const NOT_CONVERGED: u8 = 5;
}

#[derive(Debug, Parser)]
#[command(
    name = "ecoroute",
    version,
    about = "Multiclass eco-routing traffic assignment"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a network and trips pair and report its size.
    Validate(InputArgs),
    /// Solve one equilibrium and write link flows and the gap trace.
    Solve(SolveArgs),
    /// Compare time, emissions and fuel routing on the two-link network.
    Table2(Table2Args),
    /// Sweep link 2 length and speed of the two-link network.
    #[command(name = "sweep-2link")]
    Sweep2Link(Sweep2LinkArgs),
    /// Sweep the eco-routing share of demand.
    SweepFraction(SweepFractionArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// TNTP network file.
    #[arg(long)]
    pub net: PathBuf,
    /// TNTP trips file.
    #[arg(long)]
    pub trips: PathBuf,
    /// Units config (key=value lines).
    #[arg(long)]
    pub units: Option<PathBuf>,
}

/// Network input; the built-in two-link network when `--net` is absent.
#[derive(Debug, Args)]
pub struct OptionalInput {
    /// TNTP network file; omit for the built-in two-link network.
    #[arg(long, requires = "trips")]
    pub net: Option<PathBuf>,
    /// TNTP trips file.
    #[arg(long, requires = "net")]
    pub trips: Option<PathBuf>,
    /// Units config (key=value lines).
    #[arg(long, requires = "net")]
    pub units: Option<PathBuf>,
    /// Length of link 2 of the built-in network, in miles.
    #[arg(long, default_value_t = 5.0, conflicts_with = "net")]
    pub link2_length: f64,
    /// Free-flow speed of link 2 of the built-in network, in mi/h.
    #[arg(long, default_value_t = 30.0, conflicts_with = "net")]
    pub link2_speed: f64,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Relative gap threshold.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Iteration cap.
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
    /// Exit nonzero when a run does not converge.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: OptionalInput,
    #[arg(long = "eco-class", value_parser = parse_eco_class, default_value = "e")]
    pub eco_class: VehicleClass,
    /// Share of demand using eco-routing.
    #[arg(long, default_value_t = 0.0)]
    pub fraction: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Output directory, created if needed.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct Table2Args {
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Output directory, created if needed.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Msa,
    Oracle,
}

#[derive(Debug, Args)]
pub struct Sweep2LinkArgs {
    #[arg(long = "eco-class", value_parser = parse_eco_class, default_value = "e")]
    pub eco_class: VehicleClass,
    /// Grid size as LENGTHSxSPEEDS.
    #[arg(long, value_parser = parse_grid, default_value = "41x41")]
    pub grid: (usize, usize),
    #[arg(long, value_enum, default_value_t = MethodArg::Msa)]
    pub method: MethodArg,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Output directory, created if needed.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepFractionArgs {
    #[command(flatten)]
    pub input: OptionalInput,
    /// Eco classes to sweep, comma separated.
    #[arg(long = "eco-class", value_parser = parse_eco_class, value_delimiter = ',', default_value = "e,f")]
    pub eco_class: Vec<VehicleClass>,
    /// Explicit shares, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "steps")]
    pub fractions: Option<Vec<f64>>,
    /// Evenly spaced shares from 0 to 1.
    #[arg(long, default_value_t = 51)]
    pub steps: usize,
    /// Solve every share from scratch instead of warm-starting.
    #[arg(long)]
    pub reproducible: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Output directory, created if needed.
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_eco_class(s: &str) -> Result<VehicleClass, String> {
    match VehicleClass::from_code(s) {
        Some(c) if c.is_eco() => Ok(c),
        _ => Err(format!("expected e or f, got {s:?}")),
    }
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected LENGTHSxSPEEDS, got {s:?}"))?;
    let n = |v: &str| match v.trim().parse::<usize>() {
        Ok(n) if n >= 2 => Ok(n),
        _ => Err(format!("grid sides must be integers >= 2, got {v:?}")),
    };
    Ok((n(a)?, n(b)?))
}

/// Everything needed to rerun a command, written as `manifest.txt`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunManifest {
    pub command: String,
    pub net: Option<PathBuf>,
    pub trips: Option<PathBuf>,
    pub units: Option<PathBuf>,
    pub eco_classes: Vec<VehicleClass>,
    /// Fraction list or grid description.
    pub scenarios: String,
    /// Per eco class when thresholds differ.
    pub epsilon: Vec<f64>,
    pub max_iterations: usize,
    pub out: PathBuf,
    pub reproducible: bool,
}

impl RunManifest {
    /// Input paths must exist and every threshold must be positive.
    pub fn check(&self) -> Result<(), Failure> {
        for p in [&self.net, &self.trips, &self.units].into_iter().flatten() {
            if !p.exists() {
                return Err(Failure::new(
                    exit::FAILURE,
                    format!("{}: no such file", p.display()),
                ));
            }
        }
        if let Some(e) = self.epsilon.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return Err(Failure::new(
                exit::USAGE,
                format!("epsilon must be positive, got {e}"),
            ));
        }
        Ok(())
    }

    pub fn render(&self) -> String {
        let path = |p: &Option<PathBuf>| p.as_ref().map_or("-".into(), |p| p.display().to_string());
        let classes: Vec<String> = self
            .eco_classes
            .iter()
            .map(|c| c.code().to_string())
            .collect();
        let eps: Vec<String> = self.epsilon.iter().map(|e| format!("{e:e}")).collect();
        let mut s = String::new();
        let _ = writeln!(s, "command={}", self.command);
        let _ = writeln!(s, "net={}", path(&self.net));
        let _ = writeln!(s, "trips={}", path(&self.trips));
        let _ = writeln!(s, "units={}", path(&self.units));
        let _ = writeln!(s, "eco_class={}", classes.join(","));
        let _ = writeln!(s, "scenarios={}", self.scenarios);
        let _ = writeln!(s, "epsilon={}", eps.join(","));
        let _ = writeln!(s, "max_iterations={}", self.max_iterations);
        let _ = writeln!(s, "out={}", self.out.display());
        let _ = writeln!(s, "reproducible={}", self.reproducible);
        s
    }
}

/// An error message paired with the exit code it maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Tntp(TntpError::ZoneCountMismatch { .. })
            | Error::TntpFile {
                source: TntpError::ZoneCountMismatch { .. },
                ..
            } => exit::VALIDATION,
            Error::Tntp(_) | Error::TntpFile { .. } => exit::PARSE,
            Error::Solver(ecoroute_core::Error::InvalidNetwork(_))
            | Error::Solver(ecoroute_core::Error::Unreachable { .. })
            | Error::Solver(ecoroute_core::Error::NotAZone(_)) => exit::VALIDATION,
            Error::Solver(ecoroute_core::Error::InvalidConfig(_))
            | Error::Solver(ecoroute_core::Error::FractionOutOfRange(_))
            | Error::Invalid(_) => exit::USAGE,
            _ => exit::FAILURE,
        };
        Failure::new(code, e.to_string())
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Errors go to stderr.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                exit::USAGE
            } else {
                exit::SUCCESS
            };
        }
    };
    match configure_workers().and_then(|()| run(cli.command)) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn configure_workers() -> Result<(), Failure> {
    let Ok(value) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = value.trim().parse().map_err(|_| {
        Failure::new(
            exit::USAGE,
            format!("{WORKERS_ENV} must be a count, got {value:?}"),
        )
    })?;
    // a pool may already exist when called twice in one process
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

pub fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Validate(a) => cmd_validate(&a),
        Command::Solve(a) => cmd_solve(&a),
        Command::Table2(a) => cmd_table2(&a),
        Command::Sweep2Link(a) => cmd_sweep_2link(&a),
        Command::SweepFraction(a) => cmd_sweep_fraction(&a),
    }
}

/// Strips trailing zeros from the nine-digit form: 64784.0000 -> 64784.
fn compact(x: f64) -> String {
    let s = sig9(x);
    if s.contains('.') && !s.contains('e') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn cmd_validate(args: &InputArgs) -> Result<u8, Failure> {
    let manifest = RunManifest {
        command: "validate".into(),
        net: Some(args.net.clone()),
        trips: Some(args.trips.clone()),
        units: args.units.clone(),
        ..RunManifest::default()
    };
    manifest.check()?;
    let data = load_dataset(&args.net, &args.trips, args.units.as_deref())?;
    let net = &data.net.network;
    println!(
        "{} zones, {} nodes, {} links, demand {}",
        data.net.header.zones,
        net.node_count(),
        net.link_count(),
        compact(data.trips.parsed_total)
    );
    if data.trips.intrazonal_dropped > 0 {
        println!(
            "{} intrazonal entries dropped, routable demand {}",
            data.trips.intrazonal_dropped,
            compact(data.trips.demand.grand_total())
        );
    }
    if !data.net.zero_time_links.is_empty() {
        println!(
            "{} links with zero free-flow time raised to the minimum",
            data.net.zero_time_links.len()
        );
    }
    let diagnostics = validate_network(net);
    if diagnostics.is_empty() {
        return Ok(exit::SUCCESS);
    }
    for d in &diagnostics {
        eprintln!("invalid: {d}");
    }
    Err(Failure::new(
        exit::VALIDATION,
        format!("{} network problems found", diagnostics.len()),
    ))
}

fn create_out_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::new(exit::FAILURE, format!("{}: {e}", path.display()))
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, Failure> {
    let path = dir.join(name);
    File::create(&path)
        .map(BufWriter::new)
        .map_err(|e| io_failure(&path, e))
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<(), Failure> {
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| io_failure(&path, e))
}

fn solver_config(args: &SolverArgs, default: SolverConfig) -> SolverConfig {
    SolverConfig {
        epsilon: args.epsilon.unwrap_or(default.epsilon),
        max_iterations: args.max_iter.unwrap_or(default.max_iterations),
        ..default
    }
}

/// The network and single-class base demand selected by `input`.
fn load_input(input: &OptionalInput) -> Result<(Network, DemandTable, Option<Dataset>), Failure> {
    match (&input.net, &input.trips) {
        (Some(net), Some(trips)) => {
            let data = load_dataset(net, trips, input.units.as_deref())?;
            Ok((
                data.net.network.clone(),
                data.trips.demand.clone(),
                Some(data),
            ))
        }
        _ => {
            let s = TwoLinkScenario {
                link2_length: input.link2_length,
                link2_free_flow_speed: input.link2_speed,
            };
            if !s.in_range() {
                return Err(Failure::new(
                    exit::USAGE,
                    format!(
                        "link 2 must have length in [5, 15] mi and speed in [30, 60] mi/h, got {} and {}",
                        s.link2_length, s.link2_free_flow_speed
                    ),
                ));
            }
            Ok((s.network(), s.demand(VehicleClass::TimeRouting), None))
        }
    }
}

fn scenario_label(input: &OptionalInput) -> String {
    match &input.net {
        Some(_) => String::new(),
        None => format!(
            "two-link link2_length={} link2_speed={}",
            input.link2_length, input.link2_speed
        ),
    }
}

pub fn cmd_solve(args: &SolveArgs) -> Result<u8, Failure> {
    let config = solver_config(
        &args.solver,
        SolverConfig {
            epsilon: default_epsilon(args.eco_class),
            ..SolverConfig::default()
        },
    );
    let manifest = RunManifest {
        command: "solve".into(),
        net: args.input.net.clone(),
        trips: args.input.trips.clone(),
        units: args.input.units.clone(),
        eco_classes: vec![args.eco_class],
        scenarios: format!("{} fraction={}", scenario_label(&args.input), args.fraction)
            .trim()
            .to_string(),
        epsilon: vec![config.epsilon],
        max_iterations: config.max_iterations,
        out: args.out.clone(),
        reproducible: true,
    };
    manifest.check()?;
    let (net, base, _) = load_input(&args.input)?;
    let demand = split_demand(&base, args.fraction, args.eco_class).map_err(Error::from)?;
    let result = solve_with(&net, &demand, &config, None, |_, _| {}).map_err(Error::from)?;

    create_out_dir(&args.out)?;
    write_text(&args.out, "manifest.txt", &manifest.render())?;
    report::write_link_flows_csv(create(&args.out, "link_flows.csv")?, &net, &result)?;
    report::write_gap_trace_csv(create(&args.out, "gap_trace.csv")?, &result)?;

    let m = result.metrics;
    println!(
        "converged={} iterations={} gap={} tse_g={} tsfc_kwh={} tstt_vehmin={}",
        result.converged,
        result.iterations,
        sig9(result.final_gap()),
        sig9(m.tse),
        sig9(m.tsfc),
        sig9(m.tstt)
    );
    Ok(if args.solver.strict && !result.converged {
        eprintln!("error: not converged to gap {:e}", config.epsilon);
        exit::NOT_CONVERGED
    } else {
        exit::SUCCESS
    })
}

pub fn cmd_table2(args: &Table2Args) -> Result<u8, Failure> {
    let config = solver_config(&args.solver, TABLE2_SOLVER);
    let manifest = RunManifest {
        command: "table2".into(),
        eco_classes: vec![VehicleClass::EmissionsRouting, VehicleClass::FuelRouting],
        scenarios: "two-link link2_length=5 link2_speed=30".into(),
        epsilon: vec![config.epsilon],
        max_iterations: config.max_iterations,
        out: args.out.clone(),
        reproducible: true,
        ..RunManifest::default()
    };
    manifest.check()?;
    let table = run_table2(&config)?;
    let text = table.render();
    create_out_dir(&args.out)?;
    write_text(&args.out, "manifest.txt", &manifest.render())?;
    write_text(&args.out, "table2.txt", &text)?;
    print!("{text}");
    let converged = table.rows.iter().all(|r| r.result.converged);
    Ok(strict_code(args.solver.strict, converged))
}

fn strict_code(strict: bool, converged: bool) -> u8 {
    if strict && !converged {
        eprintln!("error: some runs did not converge");
        exit::NOT_CONVERGED
    } else {
        exit::SUCCESS
    }
}

pub fn cmd_sweep_2link(args: &Sweep2LinkArgs) -> Result<u8, Failure> {
    let solver = solver_config(&args.solver, HEATMAP_SOLVER);
    let spec = HeatmapSpec {
        eco_class: args.eco_class,
        length_steps: args.grid.0,
        speed_steps: args.grid.1,
        method: match args.method {
            MethodArg::Msa => HeatmapMethod::Msa,
            MethodArg::Oracle => HeatmapMethod::Oracle,
        },
        solver,
    };
    let manifest = RunManifest {
        command: "sweep-2link".into(),
        eco_classes: vec![args.eco_class],
        scenarios: format!(
            "grid={}x{} method={:?}",
            args.grid.0, args.grid.1, args.method
        )
        .to_lowercase(),
        epsilon: vec![solver.epsilon],
        max_iterations: solver.max_iterations,
        out: args.out.clone(),
        reproducible: true,
        ..RunManifest::default()
    };
    manifest.check()?;
    let sweep = run_heatmap(&spec)?;
    let code = args.eco_class.code();
    create_out_dir(&args.out)?;
    write_text(&args.out, "manifest.txt", &manifest.render())?;
    report::write_heatmap_csv(create(&args.out, &format!("heatmap_{code}.csv"))?, &sweep)?;
    let name = args.eco_class.name();
    write_text(
        &args.out,
        &format!("heatmap_{code}_tse.svg"),
        &svg::heatmap_svg(&sweep, &format!("Change in TSE (g), {name} routing"), |p| {
            p.delta().tse
        }),
    )?;
    write_text(
        &args.out,
        &format!("heatmap_{code}_tsfc.svg"),
        &svg::heatmap_svg(
            &sweep,
            &format!("Change in TSFC (kWh), {name} routing"),
            |p| p.delta().tsfc,
        ),
    )?;
    for (label, f) in [
        ("TSE", sweep.tse_fractions()),
        ("TSFC", sweep.tsfc_fractions()),
    ] {
        println!(
            "{label}: reduced at {:.2}%, increased at {:.2}%, unchanged at {:.2}% of {} points",
            100.0 * f.negative,
            100.0 * f.positive,
            100.0 * f.zero,
            sweep.points.len()
        );
    }
    println!(
        "largest link flow difference from the oracle: {} vph",
        sig9(sweep.max_flow_discrepancy())
    );
    let converged = sweep
        .points
        .iter()
        .all(|p| p.time.converged && p.eco.converged);
    Ok(strict_code(args.solver.strict, converged))
}

pub fn cmd_sweep_fraction(args: &SweepFractionArgs) -> Result<u8, Failure> {
    let fractions = args
        .fractions
        .clone()
        .unwrap_or_else(|| fraction_grid(args.steps));
    if fractions.is_empty() || args.steps < 2 && args.fractions.is_none() {
        return Err(Failure::new(exit::USAGE, "need at least one fraction"));
    }
    if let Some(p) = fractions.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Failure::new(
            exit::USAGE,
            format!("fraction {p} outside [0, 1]"),
        ));
    }
    let mut classes = args.eco_class.clone();
    classes.dedup();
    let configs: Vec<SolverConfig> = classes
        .iter()
        .map(|&c| {
            solver_config(
                &args.solver,
                SolverConfig {
                    epsilon: default_epsilon(c),
                    ..SolverConfig::default()
                },
            )
        })
        .collect();
    let list: Vec<String> = fractions.iter().map(|p| compact(*p)).collect();
    let manifest = RunManifest {
        command: "sweep-fraction".into(),
        net: args.input.net.clone(),
        trips: args.input.trips.clone(),
        units: args.input.units.clone(),
        eco_classes: classes.clone(),
        scenarios: format!(
            "{} fractions={}",
            scenario_label(&args.input),
            list.join(",")
        )
        .trim()
        .to_string(),
        epsilon: configs.iter().map(|c| c.epsilon).collect(),
        max_iterations: configs[0].max_iterations,
        out: args.out.clone(),
        reproducible: args.reproducible,
    };
    manifest.check()?;
    let (net, base, _) = load_input(&args.input)?;

    let mut sweeps: Vec<FractionSweep> = Vec::new();
    for (&class, config) in classes.iter().zip(&configs) {
        info!("sweeping {} routing over {} shares", class, fractions.len());
        let spec = FractionSweepSpec {
            eco_class: class,
            fractions: fractions.clone(),
            solver: *config,
            warm_start: !args.reproducible,
        };
        sweeps.push(run_fraction_sweep(&net, &base, &spec)?);
    }

    create_out_dir(&args.out)?;
    write_text(&args.out, "manifest.txt", &manifest.render())?;
    for sweep in &sweeps {
        let code = sweep.eco_class.code();
        report::write_fraction_csv(
            create(&args.out, &format!("sweep_fraction_{code}.csv"))?,
            sweep,
        )?;
        report::write_sweep_gap_trace_csv(
            create(&args.out, &format!("sweep_fraction_{code}_gaps.csv"))?,
            sweep,
        )?;
        let bad = sweep.points.iter().filter(|p| !p.converged).count();
        println!(
            "{} routing: {} shares, {} not converged, TSE {} -> {}, TSFC {} -> {}",
            sweep.eco_class,
            sweep.points.len(),
            bad,
            sig9(sweep.points[0].metrics.tse),
            sig9(sweep.points[sweep.points.len() - 1].metrics.tse),
            sig9(sweep.points[0].metrics.tsfc),
            sig9(sweep.points[sweep.points.len() - 1].metrics.tsfc),
        );
    }
    let refs: Vec<&FractionSweep> = sweeps.iter().collect();
    write_text(
        &args.out,
        "sweep_fraction_tse.svg",
        &svg::fraction_chart_svg(&refs, "Total system emissions", "TSE (g CO2)", |p| {
            p.metrics.tse
        }),
    )?;
    write_text(
        &args.out,
        "sweep_fraction_tsfc.svg",
        &svg::fraction_chart_svg(&refs, "Total system fuel consumption", "TSFC (kWh)", |p| {
            p.metrics.tsfc
        }),
    )?;
    let converged = sweeps.iter().all(|s| s.points.iter().all(|p| p.converged));
    Ok(strict_code(args.solver.strict, converged))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_and_class_parsers() {
        assert_eq!(parse_grid("41x41"), Ok((41, 41)));
        assert_eq!(parse_grid("3X5"), Ok((3, 5)));
        assert!(parse_grid("1x4").is_err());
        assert!(parse_grid("41").is_err());
        assert_eq!(parse_eco_class("f"), Ok(VehicleClass::FuelRouting));
        assert!(parse_eco_class("t").is_err());
    }

    #[test]
    fn compact_numbers() {
        assert_eq!(compact(64784.0), "64784");
        assert_eq!(compact(184679.561), "184679.561");
        assert_eq!(compact(0.5), "0.5");
        assert_eq!(compact(0.0), "0");
    }

    #[test]
    fn error_codes() {
        let parse: Failure = Error::Tntp(TntpError::MissingTag("NUMBER OF NODES")).into();
        assert_eq!(parse.code, exit::PARSE);
        let zones: Failure = Error::Tntp(TntpError::ZoneCountMismatch {
            network: 2,
            trips: 3,
        })
        .into();
        assert_eq!(zones.code, exit::VALIDATION);
        assert!(zones.message.contains("zone count mismatch"));
        let invalid: Failure = Error::Solver(ecoroute_core::Error::InvalidNetwork(vec![])).into();
        assert_eq!(invalid.code, exit::VALIDATION);
    }

    #[test]
    fn manifest_checks_inputs() {
        let mut m = RunManifest {
            command: "solve".into(),
            epsilon: vec![1e-4],
            ..RunManifest::default()
        };
        assert!(m.check().is_ok());
        m.epsilon = vec![0.0];
        assert_eq!(m.check().unwrap_err().code, exit::USAGE);
        m.epsilon = vec![1e-4];
        m.net = Some(PathBuf::from("/definitely/not/here.tntp"));
        assert!(m.check().is_err());
        assert!(m.render().contains("net=/definitely/not/here.tntp"));
    }
}
