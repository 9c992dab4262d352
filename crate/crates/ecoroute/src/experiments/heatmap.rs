//! Change in TSE and TSFC from switching all two-link demand to eco-routing,
//! over a grid of link 2 lengths and free-flow speeds.

use ecoroute_core::two_link::{LINK2_LENGTH_RANGE, LINK2_SPEED_RANGE};
use ecoroute_core::{
    relative_gap, solve, system_metrics, two_link_oracle, FlowState, SolverConfig, SystemMetrics,
    TwoLinkScenario, VehicleClass,
};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Deltas within this fraction of the time-routing TSE count as no change.
pub const ZERO_BAND: f64 = 1e-4;

pub const HEATMAP_SOLVER: SolverConfig = SolverConfig {
    epsilon: 1e-6,
    max_iterations: 20_000,
    step_rule: ecoroute_core::StepRule::Msa,
};

/// How grid points are equilibrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeatmapMethod {
    /// MSA `solve()`, cross-checked against the bisection oracle.
    Msa,
    /// Bisection oracle only.
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatmapSpec {
    pub eco_class: VehicleClass,
    pub length_steps: usize,
    pub speed_steps: usize,
    pub method: HeatmapMethod,
    pub solver: SolverConfig,
}

impl HeatmapSpec {
    /// 41 x 41 points: 0.25 mi and 0.75 mi/h spacing.
    pub fn new(eco_class: VehicleClass) -> Self {
        HeatmapSpec {
            eco_class,
            length_steps: 41,
            speed_steps: 41,
            method: HeatmapMethod::Msa,
            solver: HEATMAP_SOLVER,
        }
    }
}

/// Equilibrium of one routing regime on one scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeOutcome {
    pub class: VehicleClass,
    pub flows: [f64; 2],
    pub metrics: SystemMetrics,
    pub gap: f64,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatmapPoint {
    pub scenario: TwoLinkScenario,
    /// 100% time-routing, by the sweep's method.
    pub time: RegimeOutcome,
    /// 100% eco-routing, by the sweep's method.
    pub eco: RegimeOutcome,
    pub oracle_time: RegimeOutcome,
    pub oracle_eco: RegimeOutcome,
}

fn diff(a: SystemMetrics, b: SystemMetrics) -> SystemMetrics {
    SystemMetrics {
        tse: a.tse - b.tse,
        tsfc: a.tsfc - b.tsfc,
        tstt: a.tstt - b.tstt,
    }
}

impl HeatmapPoint {
    /// Eco-routing minus time-routing totals.
    pub fn delta(&self) -> SystemMetrics {
        diff(self.eco.metrics, self.time.metrics)
    }

    pub fn oracle_delta(&self) -> SystemMetrics {
        diff(self.oracle_eco.metrics, self.oracle_time.metrics)
    }

    /// Largest gap between method and oracle link flows, over both regimes.
    pub fn flow_discrepancy(&self) -> f64 {
        [
            (&self.time, &self.oracle_time),
            (&self.eco, &self.oracle_eco),
        ]
        .iter()
        .flat_map(|(a, b)| (0..2).map(move |i| (a.flows[i] - b.flows[i]).abs()))
        .fold(0.0, f64::max)
    }
}

/// Shares of grid points where eco-routing lowers, raises, or leaves a total
/// unchanged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignFractions {
    pub negative: f64,
    pub positive: f64,
    pub zero: f64,
}

#[derive(Debug, Clone)]
pub struct HeatmapSweep {
    pub spec: HeatmapSpec,
    pub lengths: Vec<f64>,
    pub speeds: Vec<f64>,
    /// Row-major: length outer, speed inner.
    pub points: Vec<HeatmapPoint>,
}

impl HeatmapSweep {
    fn fractions(&self, pick: impl Fn(&HeatmapPoint) -> (f64, f64)) -> SignFractions {
        let n = self.points.len() as f64;
        let (mut neg, mut pos, mut zero) = (0usize, 0usize, 0usize);
        for p in &self.points {
            let (delta, base) = pick(p);
            if delta.abs() <= ZERO_BAND * base {
                zero += 1;
            } else if delta < 0.0 {
                neg += 1;
            } else {
                pos += 1;
            }
        }
        SignFractions {
            negative: neg as f64 / n,
            positive: pos as f64 / n,
            zero: zero as f64 / n,
        }
    }

    pub fn tse_fractions(&self) -> SignFractions {
        self.fractions(|p| (p.delta().tse, p.time.metrics.tse))
    }

    pub fn tsfc_fractions(&self) -> SignFractions {
        self.fractions(|p| (p.delta().tsfc, p.time.metrics.tsfc))
    }

    pub fn max_flow_discrepancy(&self) -> f64 {
        self.points
            .iter()
            .map(HeatmapPoint::flow_discrepancy)
            .fold(0.0, f64::max)
    }

    pub fn point(&self, length_index: usize, speed_index: usize) -> &HeatmapPoint {
        &self.points[length_index * self.speeds.len() + speed_index]
    }
}

/// `steps` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    (0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect()
}

fn oracle_outcome(
    scenario: &TwoLinkScenario,
    class: VehicleClass,
    epsilon: f64,
) -> Result<RegimeOutcome> {
    let net = scenario.network();
    let (x1, x2) = two_link_oracle(
        &scenario.link1(),
        &scenario.link2(),
        scenario_demand(),
        class,
    );
    let mut state = FlowState::zeros(2);
    state.class_mut(class).copy_from_slice(&[x1, x2]);
    let gap = relative_gap(&net, &state, &scenario.demand(class))?;
    Ok(RegimeOutcome {
        class,
        flows: [x1, x2],
        metrics: system_metrics(&net, &state)?,
        gap,
        converged: gap <= epsilon,
        iterations: 0,
    })
}

fn scenario_demand() -> f64 {
    ecoroute_core::two_link::DEMAND
}

fn msa_outcome(
    scenario: &TwoLinkScenario,
    class: VehicleClass,
    config: &SolverConfig,
) -> Result<RegimeOutcome> {
    let r = solve(&scenario.network(), &scenario.demand(class), config)?;
    let x = r.state.aggregate();
    Ok(RegimeOutcome {
        class,
        flows: [x[0], x[1]],
        metrics: r.metrics,
        gap: r.final_gap(),
        converged: r.converged,
        iterations: r.iterations,
    })
}

/// Evaluates one grid point under 100% time-routing and 100% eco-routing.
pub fn evaluate_point(
    scenario: TwoLinkScenario,
    eco_class: VehicleClass,
    method: HeatmapMethod,
    solver: &SolverConfig,
) -> Result<HeatmapPoint> {
    let oracle_time = oracle_outcome(&scenario, VehicleClass::TimeRouting, solver.epsilon)?;
    let oracle_eco = oracle_outcome(&scenario, eco_class, solver.epsilon)?;
    let (time, eco) = match method {
        HeatmapMethod::Oracle => (oracle_time, oracle_eco),
        HeatmapMethod::Msa => (
            msa_outcome(&scenario, VehicleClass::TimeRouting, solver)?,
            msa_outcome(&scenario, eco_class, solver)?,
        ),
    };
    Ok(HeatmapPoint {
        scenario,
        time,
        eco,
        oracle_time,
        oracle_eco,
    })
}

/// Sweeps link 2 length over [5, 15] mi and free-flow speed over
/// [30, 60] mi/h. Points are evaluated in parallel and returned in grid order.
pub fn run_heatmap(spec: &HeatmapSpec) -> Result<HeatmapSweep> {
    if !spec.eco_class.is_eco() {
        return Err(Error::Invalid(format!(
            "heatmap eco class must be emissions or fuel, got {}",
            spec.eco_class
        )));
    }
    if spec.length_steps < 2 || spec.speed_steps < 2 {
        return Err(Error::Invalid(
            "heatmap grid needs at least 2 steps per axis".into(),
        ));
    }
    let lengths = linspace(
        LINK2_LENGTH_RANGE.0,
        LINK2_LENGTH_RANGE.1,
        spec.length_steps,
    );
    let speeds = linspace(LINK2_SPEED_RANGE.0, LINK2_SPEED_RANGE.1, spec.speed_steps);
    let scenarios: Vec<_> = lengths
        .iter()
        .flat_map(|&l| {
            speeds.iter().map(move |&u| TwoLinkScenario {
                link2_length: l,
                link2_free_flow_speed: u,
            })
        })
        .collect();
    let points = scenarios
        .into_par_iter()
        .map(|s| evaluate_point(s, spec.eco_class, spec.method, &spec.solver))
        .collect::<Result<Vec<_>>>()?;
    Ok(HeatmapSweep {
        spec: *spec,
        lengths,
        speeds,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_endpoints() {
        let v = linspace(5.0, 15.0, 41);
        assert_eq!(v.len(), 41);
        assert_eq!(v[0], 5.0);
        assert_eq!(v[40], 15.0);
        assert!((v[1] - 5.25).abs() < 1e-12);
        assert!((linspace(30.0, 60.0, 41)[1] - 30.75).abs() < 1e-12);
    }

    #[test]
    fn demo_point_delta_matches_table_totals() {
        let p = evaluate_point(
            TwoLinkScenario::demo(),
            VehicleClass::EmissionsRouting,
            HeatmapMethod::Msa,
            &HEATMAP_SOLVER,
        )
        .unwrap();
        // 1.51E7 - 1.37E7 from the rounded totals; exact model gives 1.429E6
        let d = p.oracle_delta().tse;
        assert!((d - 1.429e6).abs() < 0.005 * 1.429e6, "{d}");
        assert!((p.delta().tse - d).abs() < 0.005 * p.time.metrics.tse);
        assert!(p.flow_discrepancy() < 20.0);
    }

    #[test]
    fn link2_like_link1_changes_little() {
        // link 2 = link 1 with double capacity; time, fuel and CO2 all rank
        // the links the same way, so both regimes split alike
        let s = TwoLinkScenario {
            link2_length: 10.0,
            link2_free_flow_speed: 45.0,
        };
        let p = evaluate_point(
            s,
            VehicleClass::EmissionsRouting,
            HeatmapMethod::Oracle,
            &HEATMAP_SOLVER,
        )
        .unwrap();
        assert!(p.oracle_delta().tse.abs() < 1e-6 * p.oracle_time.metrics.tse);
        assert!((p.oracle_eco.flows[0] - p.oracle_time.flows[0]).abs() < 1e-6);
    }

    #[test]
    fn small_grid_shape_and_order() {
        let mut spec = HeatmapSpec::new(VehicleClass::FuelRouting);
        spec.length_steps = 3;
        spec.speed_steps = 2;
        let h = run_heatmap(&spec).unwrap();
        assert_eq!(h.points.len(), 6);
        assert_eq!(h.point(1, 1).scenario.link2_length, 10.0);
        assert_eq!(h.point(1, 1).scenario.link2_free_flow_speed, 60.0);
        let f = h.tse_fractions();
        assert!((f.negative + f.positive + f.zero - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_specs() {
        let mut spec = HeatmapSpec::new(VehicleClass::TimeRouting);
        assert!(run_heatmap(&spec).is_err());
        spec.eco_class = VehicleClass::EmissionsRouting;
        spec.speed_steps = 1;
        assert!(run_heatmap(&spec).is_err());
    }
}
