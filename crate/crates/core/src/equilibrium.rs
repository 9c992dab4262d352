//! Multiclass user equilibrium by all-or-nothing loading and the method of
//! successive averages.
//!
//! Every class routes on its own cost, but all costs are evaluated at the
//! shared aggregate flow. One iteration computes, for each class with
//! demand, the class cost of every link, a shortest-path tree per origin,
//! and the all-or-nothing flow `y` on those trees. The same trees give the
//! minimum OD costs for the relative gap
//!
//! ```text
//! g = (sum_c sum_a c_a^c x_a^c - sum_c sum_rs d_rs^c mu_rs^c) / sum_c sum_a c_a^c x_a^c
//! ```
//!
//! which is zero exactly when no driver of any class can lower their own
//! cost by switching paths.

use alloc::vec;
use alloc::vec::Vec;

use crate::cost::{system_metrics, SystemMetrics};
use crate::demand::DemandTable;
use crate::flow::FlowState;
use crate::network::{validate_network, Network, NodeId, VehicleClass};
use crate::paths::{class_costs_into, Dijkstra};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepRule {
    /// Step `1/k` on the `k`-th average.
    #[default]
    Msa,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub epsilon: f64,
    pub max_iterations: usize,
    pub step_rule: StepRule,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon: 1e-4,
            max_iterations: 20_000,
            step_rule: StepRule::Msa,
        }
    }
}

impl SolverConfig {
    pub fn new(epsilon: f64, max_iterations: usize) -> Self {
        SolverConfig {
            epsilon,
            max_iterations,
            step_rule: StepRule::Msa,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidConfig("epsilon must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1"));
        }
        Ok(())
    }
}

/// Relative gap and average excess cost of the iterate `iteration`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapRecord {
    pub iteration: usize,
    pub gap: f64,
    /// Gap numerator divided by total demand.
    pub aec: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumResult {
    pub state: FlowState,
    /// One record per iterate; the last one describes `state`.
    pub gap_trace: Vec<GapRecord>,
    pub converged: bool,
    pub iterations: usize,
    pub metrics: SystemMetrics,
    /// `sum_rs d_rs^c mu_rs^c` per class at `state`.
    pub min_cost_totals: [f64; 3],
}

impl EquilibriumResult {
    pub fn final_gap(&self) -> f64 {
        self.gap_trace.last().map_or(0.0, |g| g.gap)
    }
}

struct OriginDemand {
    origin: usize,
    origin_id: NodeId,
    destinations: Vec<(usize, NodeId, f64)>,
}

/// Demand regrouped by class and origin, in dense indices.
struct CompiledDemand {
    by_class: [Vec<OriginDemand>; 3],
    total: f64,
}

impl CompiledDemand {
    fn new(net: &Network, demand: &DemandTable) -> Result<Self> {
        let mut by_class: [Vec<OriginDemand>; 3] = [vec![], vec![], vec![]];
        for (o, d, class, rate) in demand.iter() {
            if rate == 0.0 {
                continue;
            }
            let zone_index = |n: NodeId| {
                net.node_index(n)
                    .filter(|_| net.is_zone(n))
                    .ok_or(Error::NotAZone(n))
            };
            let oi = zone_index(o)?;
            let di = zone_index(d)?;
            let list = &mut by_class[class.index()];
            // table order is (origin, destination, class), so a class's
            // origins arrive grouped
            match list.last_mut() {
                Some(od) if od.origin == oi => od.destinations.push((di, d, rate)),
                _ => list.push(OriginDemand {
                    origin: oi,
                    origin_id: o,
                    destinations: vec![(di, d, rate)],
                }),
            }
        }
        Ok(CompiledDemand {
            by_class,
            total: demand.grand_total(),
        })
    }
}

/// Per-iteration scratch space.
struct Loader {
    dijkstra: Dijkstra,
    costs: Vec<f64>,
    node_flow: Vec<f64>,
}

struct Loaded {
    /// `sum_c sum_a c_a^c x_a^c` at the state the costs came from.
    experienced: f64,
    min_cost: [f64; 3],
}

impl Loader {
    fn new(net: &Network) -> Self {
        Loader {
            dijkstra: Dijkstra::default(),
            costs: Vec::with_capacity(net.link_count()),
            node_flow: vec![0.0; net.node_count()],
        }
    }

    /// Writes the all-or-nothing flow at the costs of `state` into `target`.
    fn load(
        &mut self,
        net: &Network,
        state: &FlowState,
        demand: &CompiledDemand,
        target: &mut FlowState,
    ) -> Result<Loaded> {
        let mut experienced = 0.0;
        let mut min_cost = [0.0; 3];
        for class in VehicleClass::ALL {
            let mut y = target.class_mut(class);
            y.fill(0.0);
            let origins = &demand.by_class[class.index()];
            let x = state.class(class);
            if origins.is_empty() && x.iter().all(|&v| v == 0.0) {
                continue;
            }
            class_costs_into(net, state.aggregate(), class, &mut self.costs);
            experienced += self.costs.iter().zip(x).map(|(c, v)| c * v).sum::<f64>();

            for od in origins {
                self.dijkstra.run(net, &self.costs, od.origin);
                let labels = &self.dijkstra.labels;
                for &(di, d, rate) in &od.destinations {
                    if !labels[di].is_finite() {
                        return Err(Error::Unreachable {
                            origin: od.origin_id,
                            destination: d,
                            class,
                        });
                    }
                    min_cost[class.index()] += rate * labels[di];
                    self.node_flow[di] += rate;
                }
                // push node demand back up the tree, leaves first
                for &v in self.dijkstra.order.iter().rev() {
                    let f = self.node_flow[v];
                    if f == 0.0 {
                        continue;
                    }
                    self.node_flow[v] = 0.0;
                    if let Some(li) = self.dijkstra.pred[v] {
                        y[li] += f;
                        if let Some((tail, _)) = net.endpoints(li) {
                            self.node_flow[tail] += f;
                        }
                    }
                }
            }
        }
        Ok(Loaded {
            experienced,
            min_cost,
        })
    }
}

fn check_state(net: &Network, state: &FlowState) -> Result<()> {
    if state.link_count() != net.link_count() {
        return Err(Error::StateMismatch {
            expected: net.link_count(),
            found: state.link_count(),
        });
    }
    if state.min_flow() < 0.0 {
        return Err(Error::InvalidFlow(state.min_flow()));
    }
    Ok(())
}

fn gap_of(loaded: &Loaded, total_demand: f64) -> (f64, f64) {
    let excess = loaded.experienced - loaded.min_cost.iter().sum::<f64>();
    let gap = if loaded.experienced == 0.0 {
        0.0
    } else {
        excess / loaded.experienced
    };
    let aec = if total_demand == 0.0 {
        0.0
    } else {
        excess / total_demand
    };
    (gap, aec)
}

/// All demand of every class and origin loaded onto the shortest paths at
/// the current costs.
pub fn all_or_nothing(net: &Network, state: &FlowState, demand: &DemandTable) -> Result<FlowState> {
    check_state(net, state)?;
    let compiled = CompiledDemand::new(net, demand)?;
    let mut y = FlowState::zeros(net.link_count());
    Loader::new(net).load(net, state, &compiled, &mut y)?;
    Ok(y)
}

/// Relative gap of a feasible state, with minimum costs from fresh shortest
/// paths. Zero when the state carries no flow.
pub fn relative_gap(net: &Network, state: &FlowState, demand: &DemandTable) -> Result<f64> {
    check_state(net, state)?;
    let compiled = CompiledDemand::new(net, demand)?;
    let mut scratch = FlowState::zeros(net.link_count());
    let loaded = Loader::new(net).load(net, state, &compiled, &mut scratch)?;
    Ok(gap_of(&loaded, compiled.total).0)
}

/// Solves for a multiclass user equilibrium from all-or-nothing flows at
/// free-flow costs.
pub fn solve(
    net: &Network,
    demand: &DemandTable,
    config: &SolverConfig,
) -> Result<EquilibriumResult> {
    solve_with(net, demand, config, None, |_, _| {})
}

/// Like [`solve`], optionally starting from a feasible `initial` state and
/// calling `observe(k, x_k)` on every iterate.
///
/// Iterate `x_1` is the initial state or the free-flow all-or-nothing flow.
/// At iterate `k` the gap is measured on the trees that also produce the
/// auxiliary flow `y_k`; if it is above `epsilon`,
/// `x_{k+1} = x_k + (y_k - x_k) / (k + 1)`. Running out of iterations is not
/// an error: the result comes back with `converged == false`.
pub fn solve_with<F>(
    net: &Network,
    demand: &DemandTable,
    config: &SolverConfig,
    initial: Option<FlowState>,
    mut observe: F,
) -> Result<EquilibriumResult>
where
    F: FnMut(usize, &FlowState),
{
    config.validate()?;
    let diagnostics = validate_network(net);
    if !diagnostics.is_empty() {
        return Err(Error::InvalidNetwork(diagnostics));
    }
    let compiled = CompiledDemand::new(net, demand)?;
    let mut loader = Loader::new(net);
    let mut aux = FlowState::zeros(net.link_count());

    let mut x = match initial {
        Some(s) => {
            check_state(net, &s)?;
            s
        }
        None => {
            let zero = FlowState::zeros(net.link_count());
            let mut first = FlowState::zeros(net.link_count());
            loader.load(net, &zero, &compiled, &mut first)?;
            first
        }
    };

    let mut trace = Vec::new();
    let mut k = 1;
    loop {
        observe(k, &x);
        let loaded = loader.load(net, &x, &compiled, &mut aux)?;
        let (gap, aec) = gap_of(&loaded, compiled.total);
        trace.push(GapRecord {
            iteration: k,
            gap,
            aec,
        });
        let converged = gap <= config.epsilon;
        if converged || k >= config.max_iterations {
            let metrics = system_metrics(net, &x)?;
            return Ok(EquilibriumResult {
                state: x,
                gap_trace: trace,
                converged,
                iterations: k,
                metrics,
                min_cost_totals: loaded.min_cost,
            });
        }
        let step = match config.step_rule {
            StepRule::Msa => 1.0 / (k + 1) as f64,
        };
        x.blend_towards(&aux, step);
        k += 1;
    }
}
