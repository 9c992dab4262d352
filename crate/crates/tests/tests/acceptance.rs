//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.
//!
//! City criteria read TNTP files from `$ECOROUTE_TNTP_DIR` (default
//! `data/tntp` at the workspace root), either flat or in one subdirectory
//! per city. An optional `<prefix>_units.txt` next to a network file gives
//! its unit conversions.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use ecoroute::experiments::heatmap::{run_heatmap, HeatmapMethod, HeatmapSpec};
use ecoroute::experiments::sweep::{
    certify_sweep, fraction_grid, interior_minimum, net_change, run_fraction_sweep,
    slope_sign_agreement, FractionSweep, FractionSweepSpec,
};
use ecoroute::experiments::table2::{run_table2, TABLE2_SOLVER};
use ecoroute::report;
use ecoroute::tntp::{load_dataset, Dataset};
use ecoroute_core::{
    bpr_time, emissions, fuel, solve_with, speed, DemandTable, Link, LinkId, Network, NodeId,
    SolverConfig, TwoLinkScenario, VehicleClass,
};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

// ---- two-link criteria ----

fn table2_values() -> Outcome {
    use VehicleClass::*;
    // (regime, link, flow, time, fuel, emissions)
    let expected = [
        (TimeRouting, 0, 1118.5, 16.5, 15.4, 4215.9),
        (TimeRouting, 1, 2881.5, 16.5, 11.9, 3107.7),
        (EmissionsRouting, 0, 548.8, 13.5, 13.6, 3774.9),
        (EmissionsRouting, 1, 3451.2, 23.3, 14.7, 3774.9),
        (FuelRouting, 0, 710.8, 13.8, 13.8, 3826.1),
        (FuelRouting, 1, 3289.2, 21.0, 13.8, 3559.0),
    ];
    let totals = [
        (TimeRouting, 65853.5, 51419.9, 1.37e7),
        (EmissionsRouting, 87828.1, 58370.5, 1.51e7),
        (FuelRouting, 78824.4, 55242.8, 1.44e7),
    ];
    let start = Instant::now();
    let table = match run_table2(&TABLE2_SOLVER) {
        Ok(t) => t,
        Err(e) => return outcome(false, format!("solver error: {e}")),
    };
    let elapsed = start.elapsed();
    let mut worst = (0.0f64, String::new());
    let mut note = |err: f64, what: String| {
        if err > worst.0 {
            worst = (err, what);
        }
    };
    for (class, i, flow, time, f, e) in expected {
        let l = &table.row(class).links[i];
        for (name, got, want) in [
            ("flow", l.flow, flow),
            ("time", l.costs.travel_time, time),
            ("fuel", l.costs.fuel, f),
            ("emissions", l.costs.emissions, e),
        ] {
            note(
                rel_err(got, want),
                format!("{class} link {} {name} {got:.4} vs {want}", i + 1),
            );
        }
    }
    for (class, tstt, tsfc, tse) in totals {
        let m = table.row(class).metrics;
        for (name, got, want) in [
            ("TSTT", m.tstt, tstt),
            ("TSFC", m.tsfc, tsfc),
            ("TSE", m.tse, tse),
        ] {
            note(
                rel_err(got, want),
                format!("{class} {name} {got:.1} vs {want}"),
            );
        }
    }
    let converged = table.rows.iter().all(|r| r.result.converged);
    let pass = worst.0 <= 0.005 && elapsed < Duration::from_secs(1) && converged;
    outcome(
        pass,
        format!(
            "24 link values + 9 totals, worst {:.3}% ({}), converged {converged}, {:.0} ms (limit 0.5%, 1 s)",
            100.0 * worst.0,
            worst.1,
            elapsed.as_secs_f64() * 1e3
        ),
    )
}

fn paradox_deltas() -> Outcome {
    use VehicleClass::*;
    let table = match run_table2(&TABLE2_SOLVER) {
        Ok(t) => t,
        Err(e) => return outcome(false, format!("solver error: {e}")),
    };
    let checks = [
        ("TSE emissions", table.tse_change(EmissionsRouting), 10.2),
        ("TSE fuel", table.tse_change(FuelRouting), 5.1),
        ("TSFC emissions", table.tsfc_change(EmissionsRouting), 13.5),
        ("TSFC fuel", table.tsfc_change(FuelRouting), 7.4),
    ];
    let mut pass = true;
    let parts: Vec<String> = checks
        .iter()
        .map(|&(name, got, want)| {
            let ok = (100.0 * got - want).abs() <= 0.2;
            pass &= ok;
            format!(
                "{name} {:+.2}% vs {want:+}% {}",
                100.0 * got,
                if ok { "ok" } else { "OUT" }
            )
        })
        .collect();
    outcome(pass, format!("{} (limit +-0.2pp)", parts.join(", ")))
}

fn heatmap_fractions() -> Outcome {
    let mut spec = HeatmapSpec::new(VehicleClass::EmissionsRouting);
    spec.method = HeatmapMethod::Oracle;
    let start = Instant::now();
    let sweep = match run_heatmap(&spec) {
        Ok(s) => s,
        Err(e) => return outcome(false, format!("error: {e}")),
    };
    let elapsed = start.elapsed();
    let f = sweep.tse_fractions();
    let reduce_ok = (100.0 * f.negative - 16.8).abs() <= 2.0;
    let increase_ok = (100.0 * f.positive - 83.1).abs() <= 2.0;
    let fast = elapsed < Duration::from_secs(60);
    outcome(
        reduce_ok && increase_ok && fast,
        format!(
            "41x41, reduce {:.2}% vs 16.8% {}, increase {:.2}% vs 83.1% {}, unchanged {:.2}%, {:.2} s (limit +-2pp, 60 s)",
            100.0 * f.negative,
            if reduce_ok { "ok" } else { "OUT" },
            100.0 * f.positive,
            if increase_ok { "ok" } else { "OUT" },
            100.0 * f.zero,
            elapsed.as_secs_f64()
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let limit = 0.005 * ecoroute_core::two_link::DEMAND;
    let mut worst = 0.0f64;
    let mut unconverged = 0;
    let mut points = 0;
    for class in [VehicleClass::EmissionsRouting, VehicleClass::FuelRouting] {
        let sweep = match run_heatmap(&HeatmapSpec::new(class)) {
            Ok(s) => s,
            Err(e) => return outcome(false, format!("error: {e}")),
        };
        worst = worst.max(sweep.max_flow_discrepancy());
        points += sweep.points.len();
        unconverged += sweep
            .points
            .iter()
            .filter(|p| !(p.time.converged && p.eco.converged))
            .count();
    }
    outcome(
        worst <= limit,
        format!(
            "t/e/f over {points} grid points, largest flow difference {worst:.3} vph (limit {limit} vph), {unconverged} points above gap 1e-6"
        ),
    )
}

// ---- city criteria ----

#[derive(Clone, Copy, PartialEq)]
enum Trend {
    InteriorMinimum,
    NetIncrease,
    NetDecrease,
}

struct City {
    name: &'static str,
    prefix: &'static str,
    zones: u32,
    nodes: usize,
    links: usize,
    demand: f64,
    steps: usize,
    trend: Trend,
    emissions_epsilon: f64,
}

const CITIES: [City; 4] = [
    City {
        name: "Eastern Massachusetts",
        prefix: "EMA",
        zones: 74,
        nodes: 74,
        links: 258,
        demand: 65576.3754,
        steps: 51,
        trend: Trend::InteriorMinimum,
        emissions_epsilon: 1e-8,
    },
    City {
        name: "Barcelona",
        prefix: "Barcelona",
        zones: 110,
        nodes: 1020,
        links: 2522,
        demand: 184679.561,
        steps: 5,
        trend: Trend::NetIncrease,
        emissions_epsilon: 1e-4,
    },
    City {
        name: "Winnipeg",
        prefix: "Winnipeg",
        zones: 147,
        nodes: 1052,
        links: 2836,
        demand: 64784.0,
        steps: 5,
        trend: Trend::NetIncrease,
        emissions_epsilon: 1e-4,
    },
    City {
        name: "Chicago",
        prefix: "ChicagoSketch",
        zones: 387,
        nodes: 933,
        links: 2950,
        demand: 1260907.44,
        steps: 5,
        trend: Trend::NetDecrease,
        emissions_epsilon: 1e-4,
    },
];

fn data_dir() -> PathBuf {
    std::env::var_os("ECOROUTE_TNTP_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            let crate_dir = Path::new(env!("CARGO_MANIFEST_DIR"));
            let root = crate_dir.ancestors().nth(2).unwrap_or(crate_dir);
            root.join("data").join("tntp")
        })
}

/// Finds `name` (case-insensitively) in `dir` or one level below it.
fn find_file(dir: &Path, name: &str) -> Option<PathBuf> {
    let matches = |p: &Path| {
        p.file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.eq_ignore_ascii_case(name))
    };
    let entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .ok()?
        .flatten()
        .map(|e| e.path())
        .collect();
    entries
        .iter()
        .find(|p| p.is_file() && matches(p))
        .cloned()
        .or_else(|| {
            entries.iter().filter(|p| p.is_dir()).find_map(|sub| {
                std::fs::read_dir(sub)
                    .ok()?
                    .flatten()
                    .map(|e| e.path())
                    .find(|p| matches(p))
            })
        })
}

fn load_city(city: &City) -> Result<Dataset, String> {
    let dir = data_dir();
    let net = find_file(&dir, &format!("{}_net.tntp", city.prefix));
    let trips = find_file(&dir, &format!("{}_trips.tntp", city.prefix));
    let (Some(net), Some(trips)) = (net, trips) else {
        return Err(format!(
            "dataset missing ({}_net/_trips.tntp under {})",
            city.prefix,
            dir.display()
        ));
    };
    let units = net
        .parent()
        .map(|p| p.join(format!("{}_units.txt", city.prefix)))
        .filter(|p| p.exists());
    load_dataset(&net, &trips, units.as_deref()).map_err(|e| e.to_string())
}

struct CityRun {
    city: &'static City,
    data: Dataset,
    sweeps: Vec<(FractionSweep, f64)>,
    elapsed: Duration,
}

fn run_city(city: &'static City) -> Result<CityRun, String> {
    let data = load_city(city)?;
    let start = Instant::now();
    let mut sweeps = Vec::new();
    for class in [VehicleClass::EmissionsRouting, VehicleClass::FuelRouting] {
        let mut spec = FractionSweepSpec::new(class, fraction_grid(city.steps));
        if class == VehicleClass::EmissionsRouting {
            spec.solver.epsilon = city.emissions_epsilon;
        }
        spec.warm_start = true;
        let sweep = run_fraction_sweep(&data.net.network, &data.trips.demand, &spec)
            .map_err(|e| format!("{class}: {e}"))?;
        sweeps.push((sweep, spec.solver.epsilon));
    }
    Ok(CityRun {
        city,
        data,
        sweeps,
        elapsed: start.elapsed(),
    })
}

fn tntp_ingestion() -> Outcome {
    let mut pass = true;
    let parts: Vec<String> = CITIES
        .iter()
        .map(|city| match load_city(city) {
            Err(e) => {
                pass = false;
                format!("{}: {e}", city.name)
            }
            Ok(d) => {
                let n = &d.net.network;
                let counts = d.net.header.zones == city.zones
                    && n.node_count() == city.nodes
                    && n.link_count() == city.links;
                let demand = rel_err(d.trips.parsed_total, city.demand) <= 1e-4;
                pass &= counts && demand;
                format!(
                    "{}: {}/{}/{} demand {} {}",
                    city.name,
                    d.net.header.zones,
                    n.node_count(),
                    n.link_count(),
                    d.trips.parsed_total,
                    if counts && demand { "ok" } else { "OUT" }
                )
            }
        })
        .collect();
    outcome(pass, parts.join("; "))
}

fn convergence_certificate(runs: &[Result<CityRun, String>]) -> Outcome {
    let mut pass = true;
    let parts: Vec<String> = runs
        .iter()
        .zip(&CITIES)
        .map(|(run, city)| match run {
            Err(e) => {
                pass = false;
                format!("{}: {e}", city.name)
            }
            Ok(r) => {
                let mut converged = 0;
                let mut total = 0;
                let mut bad = 0;
                for (sweep, eps) in &r.sweeps {
                    match certify_sweep(&r.data.net.network, &r.data.trips.demand, sweep) {
                        Ok(certs) => {
                            total += certs.len();
                            converged += certs.iter().filter(|c| c.converged).count();
                            bad += certs.iter().filter(|c| !c.holds(*eps)).count();
                        }
                        Err(_) => bad += sweep.points.len(),
                    }
                }
                pass &= bad == 0;
                format!(
                    "{}: {converged}/{total} converged, {bad} certificate failures",
                    city.name
                )
            }
        })
        .collect();
    outcome(pass, parts.join("; "))
}

fn trend_shapes(runs: &[Result<CityRun, String>]) -> Outcome {
    let mut pass = true;
    let parts: Vec<String> = runs
        .iter()
        .zip(&CITIES)
        .map(|(run, city)| match run {
            Err(e) => {
                pass = false;
                format!("{}: {e}", city.name)
            }
            Ok(r) => {
                let mut ok = true;
                for (sweep, _) in &r.sweeps {
                    for series in [sweep.tse(), sweep.tsfc()] {
                        ok &= match r.city.trend {
                            Trend::InteriorMinimum => interior_minimum(&series).is_some(),
                            Trend::NetIncrease => net_change(&series) > 0.0,
                            Trend::NetDecrease => net_change(&series) < 0.0,
                        };
                    }
                    ok &= slope_sign_agreement(&sweep.tse(), &sweep.tsfc()) >= 0.9;
                }
                if r.city.trend == Trend::InteriorMinimum {
                    ok &= r.elapsed < Duration::from_secs(600);
                }
                pass &= ok;
                format!(
                    "{}: {} ({} shares, {:.1} s)",
                    city.name,
                    if ok { "ok" } else { "OUT" },
                    city.steps,
                    r.elapsed.as_secs_f64()
                )
            }
        })
        .collect();
    outcome(pass, parts.join("; "))
}

// ---- property suites ----

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn sample<S: Strategy>(runner: &mut TestRunner, strategy: &S) -> S::Value {
    strategy
        .new_tree(runner)
        .expect("strategy generates")
        .current()
}

fn random_link() -> impl Strategy<Value = (Link, f64, f64)> {
    (
        1.0f64..1e4,
        0.01f64..50.0,
        5.0f64..80.0,
        0.0f64..2.0,
        1.0f64..8.0,
        0.0f64..3e4,
        0.0f64..3e4,
    )
        .prop_map(|(cap, len, u, a, b, x1, x2)| {
            let link = Link::from_speed(LinkId(1), NodeId(1), NodeId(2), cap, len, u, a, b);
            (link, x1.min(x2), x1.max(x2))
        })
}

fn monotone_and_consistent() -> Result<String, String> {
    let mut r = runner(10_000);
    let strategy = random_link();
    let mut worst_identity = 0.0f64;
    for _ in 0..10_000 {
        let (link, lo, hi) = sample(&mut r, &strategy);
        let pairs = [
            ("time", bpr_time(&link, lo), bpr_time(&link, hi)),
            ("fuel", fuel(&link, lo), fuel(&link, hi)),
            ("emissions", emissions(&link, lo), emissions(&link, hi)),
        ];
        for (name, a, b) in pairs {
            let (a, b) = (a.map_err(|e| e.to_string())?, b.map_err(|e| e.to_string())?);
            if b < a {
                return Err(format!(
                    "{name} decreases from flow {lo} to {hi} on {link:?}"
                ));
            }
        }
        for x in [lo, hi] {
            let t = bpr_time(&link, x).unwrap();
            let u = speed(&link, x).unwrap();
            worst_identity = worst_identity.max(rel_err(u * t / 60.0, link.length));
        }
    }
    if worst_identity > 1e-9 {
        return Err(format!(
            "speed x time / 60 off length by {worst_identity:e}"
        ));
    }
    Ok(format!(
        "monotone over 10000 links, identity within {worst_identity:.1e}"
    ))
}

/// Random bidirectional grid with random demand of all three classes.
fn random_instance(r: &mut TestRunner) -> (Network, DemandTable) {
    let rows = sample(r, &(2u32..4));
    let cols = sample(r, &(2u32..4));
    let id = |row: u32, c: u32| NodeId(row * cols + c + 1);
    let mut links = Vec::new();
    for row in 0..rows {
        for c in 0..cols {
            let mut pairs = Vec::new();
            if c + 1 < cols {
                pairs.extend([(id(row, c), id(row, c + 1)), (id(row, c + 1), id(row, c))]);
            }
            if row + 1 < rows {
                pairs.extend([(id(row, c), id(row + 1, c)), (id(row + 1, c), id(row, c))]);
            }
            for (a, b) in pairs {
                let (cap, len, u) = sample(r, &(200.0f64..3000.0, 0.2f64..5.0, 20.0f64..65.0));
                let n = links.len() as u32 + 1;
                links.push(Link::from_speed(LinkId(n), a, b, cap, len, u, 0.15, 4.0));
            }
        }
    }
    let nodes: Vec<NodeId> = (1..=rows * cols).map(NodeId).collect();
    let net = Network::new(nodes.clone(), links, nodes, NodeId(1));
    let mut demand = DemandTable::new();
    let pairs = sample(r, &(1usize..6));
    for _ in 0..pairs {
        let (o, d, c, rate) = sample(
            r,
            &(1..=rows * cols, 1..=rows * cols, 0usize..3, 1.0f64..2000.0),
        );
        demand
            .add(NodeId(o), NodeId(d), VehicleClass::ALL[c], rate)
            .unwrap();
    }
    (net, demand)
}

fn msa_feasibility() -> Result<String, String> {
    let mut r = runner(1);
    let instances = 100;
    let mut iterates = 0usize;
    for _ in 0..instances {
        let (net, demand) = random_instance(&mut r);
        let scale = 1.0 + demand.grand_total();
        let mut failure = None;
        solve_with(
            &net,
            &demand,
            &SolverConfig::new(1e-5, 400),
            None,
            |k, x| {
                iterates += 1;
                let residual = x.conservation_residual(&net, &demand);
                if failure.is_none() && (x.min_flow() < 0.0 || residual > 1e-9 * scale) {
                    failure = Some(format!(
                        "iteration {k}: min flow {}, residual {residual}",
                        x.min_flow()
                    ));
                }
            },
        )
        .map_err(|e| e.to_string())?;
        if let Some(f) = failure {
            return Err(f);
        }
    }
    Ok(format!(
        "{iterates} iterates of {instances} random instances feasible"
    ))
}

/// Everything a reproducible two-link share sweep and a small heatmap
/// would write, as bytes.
fn reproducible_outputs() -> Result<Vec<Vec<u8>>, String> {
    let s = TwoLinkScenario::demo();
    let (net, base) = (s.network(), s.demand(VehicleClass::TimeRouting));
    let mut files = Vec::new();
    for class in [VehicleClass::EmissionsRouting, VehicleClass::FuelRouting] {
        let mut spec = FractionSweepSpec::new(class, fraction_grid(11));
        spec.solver.max_iterations = 2000;
        spec.warm_start = false;
        let sweep = run_fraction_sweep(&net, &base, &spec).map_err(|e| e.to_string())?;
        let mut csv = Vec::new();
        report::write_fraction_csv(&mut csv, &sweep).map_err(|e| e.to_string())?;
        let mut gaps = Vec::new();
        report::write_sweep_gap_trace_csv(&mut gaps, &sweep).map_err(|e| e.to_string())?;
        files.extend([csv, gaps]);
    }
    let mut spec = HeatmapSpec::new(VehicleClass::EmissionsRouting);
    (spec.length_steps, spec.speed_steps) = (5, 5);
    let heatmap = run_heatmap(&spec).map_err(|e| e.to_string())?;
    let mut csv = Vec::new();
    report::write_heatmap_csv(&mut csv, &heatmap).map_err(|e| e.to_string())?;
    files.push(csv);
    Ok(files)
}

fn determinism() -> Result<String, String> {
    let (a, b) = (reproducible_outputs()?, reproducible_outputs()?);
    if a != b {
        return Err("reproducible outputs differ between runs".into());
    }
    let bytes: usize = a.iter().map(Vec::len).sum();
    Ok(format!(
        "repeat runs bit-identical ({} files, {bytes} bytes)",
        a.len()
    ))
}

fn property_suites() -> Outcome {
    let results = [monotone_and_consistent(), msa_feasibility(), determinism()];
    let pass = results.iter().all(Result::is_ok);
    let parts: Vec<String> = results
        .into_iter()
        .map(|r| r.unwrap_or_else(|e| format!("FAILED: {e}")))
        .collect();
    outcome(pass, parts.join("; "))
}

fn main() {
    let mut failed = 0;
    let mut report = |name: &str, o: Outcome| {
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    };
    report("Table 2 reproduction", table2_values());
    report("Paradox deltas", paradox_deltas());
    report("Heatmap fractions", heatmap_fractions());
    report("Oracle equivalence", oracle_equivalence());
    let runs: Vec<Result<CityRun, String>> = CITIES.iter().map(run_city).collect();
    report("Convergence certificate", convergence_certificate(&runs));
    report("City trend shapes", trend_shapes(&runs));
    report("Property suites", property_suites());
    report("TNTP ingestion", tntp_ingestion());
    println!("{} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
