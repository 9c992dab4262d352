//! Equilibria over a range of eco-routing shares on one network.

use ecoroute_core::{
    relative_gap, solve, solve_with, split_demand, DemandTable, FlowState, GapRecord, Network,
    SolverConfig, SystemMetrics, VehicleClass,
};
use log::{info, warn};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Default gap threshold per eco class: 1e-6 for fuel, 1e-4 for emissions.
pub fn default_epsilon(eco_class: VehicleClass) -> f64 {
    match eco_class {
        VehicleClass::FuelRouting => 1e-6,
        _ => 1e-4,
    }
}

/// `0, step, 2 step, ..., 1`.
pub fn fraction_grid(points: usize) -> Vec<f64> {
    crate::experiments::heatmap::linspace(0.0, 1.0, points)
}

#[derive(Debug, Clone)]
pub struct FractionSweepSpec {
    pub eco_class: VehicleClass,
    pub fractions: Vec<f64>,
    pub solver: SolverConfig,
    /// Start each fraction from the previous one's flows. Off in
    /// reproducibility mode, where every point is solved from scratch.
    pub warm_start: bool,
}

impl FractionSweepSpec {
    pub fn new(eco_class: VehicleClass, fractions: Vec<f64>) -> Self {
        FractionSweepSpec {
            eco_class,
            fractions,
            solver: SolverConfig {
                epsilon: default_epsilon(eco_class),
                ..SolverConfig::default()
            },
            warm_start: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FractionPoint {
    pub fraction: f64,
    pub metrics: SystemMetrics,
    pub gap: f64,
    pub converged: bool,
    pub iterations: usize,
    pub gap_trace: Vec<GapRecord>,
    pub state: FlowState,
}

#[derive(Debug, Clone)]
pub struct FractionSweep {
    pub eco_class: VehicleClass,
    pub epsilon: f64,
    /// 100% time-routing totals.
    pub baseline: SystemMetrics,
    pub points: Vec<FractionPoint>,
}

impl FractionSweep {
    pub fn tse(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.metrics.tse).collect()
    }

    pub fn tsfc(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.metrics.tsfc).collect()
    }

    /// Change against the time-routing baseline.
    pub fn delta(&self, i: usize) -> SystemMetrics {
        let m = self.points[i].metrics;
        SystemMetrics {
            tse: m.tse - self.baseline.tse,
            tsfc: m.tsfc - self.baseline.tsfc,
            tstt: m.tstt - self.baseline.tstt,
        }
    }
}

/// Reshapes a state solved at eco share `from` into a feasible state for
/// share `to`. Each class's flow pattern is a feasible routing of the full
/// demand once divided by its share, so scaling patterns keeps feasibility.
pub fn rescale_state(state: &FlowState, eco_class: VehicleClass, from: f64, to: f64) -> FlowState {
    let t = state.class(VehicleClass::TimeRouting);
    let e = state.class(eco_class);
    let time_pattern: Vec<f64> = if from < 1.0 {
        t.iter().map(|x| x / (1.0 - from)).collect()
    } else {
        e.to_vec()
    };
    let eco_pattern: Vec<f64> = if from > 0.0 {
        e.iter().map(|x| x / from).collect()
    } else {
        time_pattern.clone()
    };
    let mut flows = [vec![0.0; t.len()], vec![0.0; t.len()], vec![0.0; t.len()]];
    flows[VehicleClass::TimeRouting.index()] =
        time_pattern.iter().map(|x| (1.0 - to) * x).collect();
    flows[eco_class.index()] = eco_pattern.iter().map(|x| to * x).collect();
    FlowState::from_class_flows(flows)
}

fn solve_point(
    net: &Network,
    base: &DemandTable,
    spec: &FractionSweepSpec,
    fraction: f64,
    warm: Option<FlowState>,
) -> Result<FractionPoint> {
    let demand = split_demand(base, fraction, spec.eco_class)?;
    let r = solve_with(net, &demand, &spec.solver, warm, |_, _| {})?;
    if !r.converged {
        warn!(
            "{} share {fraction}: gap {:.3e} above {:.1e} after {} iterations",
            spec.eco_class,
            r.final_gap(),
            spec.solver.epsilon,
            r.iterations
        );
    } else {
        info!(
            "{} share {fraction}: converged in {} iterations",
            spec.eco_class, r.iterations
        );
    }
    Ok(FractionPoint {
        fraction,
        metrics: r.metrics,
        gap: r.final_gap(),
        converged: r.converged,
        iterations: r.iterations,
        gap_trace: r.gap_trace.clone(),
        state: r.state,
    })
}

/// Solves the multiclass equilibrium at each eco-routing share. Points that
/// do not converge are kept and flagged; the sweep carries on.
pub fn run_fraction_sweep(
    net: &Network,
    base: &DemandTable,
    spec: &FractionSweepSpec,
) -> Result<FractionSweep> {
    if !spec.eco_class.is_eco() {
        return Err(Error::Invalid(format!(
            "sweep eco class must be emissions or fuel, got {}",
            spec.eco_class
        )));
    }
    if let Some(p) = spec.fractions.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Invalid(format!("fraction {p} outside [0, 1]")));
    }
    spec.solver.validate()?;

    let points = if spec.warm_start {
        let mut out: Vec<FractionPoint> = Vec::with_capacity(spec.fractions.len());
        for &p in &spec.fractions {
            let warm = out
                .last()
                .map(|prev| rescale_state(&prev.state, spec.eco_class, prev.fraction, p));
            out.push(solve_point(net, base, spec, p, warm)?);
        }
        out
    } else {
        spec.fractions
            .par_iter()
            .map(|&p| solve_point(net, base, spec, p, None))
            .collect::<Result<Vec<_>>>()?
    };

    let baseline = match points.iter().find(|p| p.fraction == 0.0) {
        Some(p) => p.metrics,
        None => solve(net, base, &spec.solver)?.metrics,
    };
    Ok(FractionSweep {
        eco_class: spec.eco_class,
        epsilon: spec.solver.epsilon,
        baseline,
        points,
    })
}

/// Independent check of one reported sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub fraction: f64,
    /// Gap recomputed from the stored flows.
    pub recomputed_gap: f64,
    /// Final gap over the gap at iteration 10, when the run got that far.
    pub trace_ratio: Option<f64>,
    pub converged: bool,
}

impl Certificate {
    /// Iteration whose gap the final gap is compared against.
    pub const REFERENCE_ITERATION: usize = 10;

    /// Converged points must satisfy the threshold on recomputation and have
    /// shed at least 90% of their iteration-10 gap. Unconverged points are
    /// flagged in the output and make no claim.
    pub fn holds(&self, epsilon: f64) -> bool {
        !self.converged
            || (self.recomputed_gap <= epsilon && self.trace_ratio.is_none_or(|r| r <= 0.1))
    }
}

/// Recomputes the relative gap of every point from its flows and the split
/// demand, without trusting the solver's own trace.
pub fn certify_sweep(
    net: &Network,
    base: &DemandTable,
    sweep: &FractionSweep,
) -> Result<Vec<Certificate>> {
    sweep
        .points
        .iter()
        .map(|p| {
            let demand = split_demand(base, p.fraction, sweep.eco_class)?;
            let recomputed_gap = relative_gap(net, &p.state, &demand)?;
            let reference = p
                .gap_trace
                .iter()
                .find(|g| g.iteration == Certificate::REFERENCE_ITERATION);
            let trace_ratio = match (reference, p.gap_trace.last()) {
                (Some(r), Some(last)) if r.gap > 0.0 => Some(last.gap / r.gap),
                (Some(_), Some(_)) => Some(0.0),
                _ => None,
            };
            Ok(Certificate {
                fraction: p.fraction,
                recomputed_gap,
                trace_ratio,
                converged: p.converged,
            })
        })
        .collect()
}

/// Last minus first value.
pub fn net_change(values: &[f64]) -> f64 {
    match (values.first(), values.last()) {
        (Some(a), Some(b)) => b - a,
        _ => 0.0,
    }
}

/// Index of the minimum when it lies strictly inside the series and below
/// both endpoints.
pub fn interior_minimum(values: &[f64]) -> Option<usize> {
    let (i, &min) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))?;
    let interior = i > 0 && i + 1 < values.len();
    (interior && min < values[0] && min < values[values.len() - 1]).then_some(i)
}

/// Share of consecutive steps on which both series move in the same
/// direction.
pub fn slope_sign_agreement(a: &[f64], b: &[f64]) -> f64 {
    let steps = a.len().min(b.len()).saturating_sub(1);
    if steps == 0 {
        return 1.0;
    }
    let same = (0..steps)
        .filter(|&i| {
            let da = a[i + 1] - a[i];
            let db = b[i + 1] - b[i];
            da.signum() == db.signum() || (da == 0.0 && db == 0.0)
        })
        .count();
    same as f64 / steps as f64
}
