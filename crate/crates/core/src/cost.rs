//! Link cost functions and system totals.
//!
//! Travel time follows the BPR volume-delay curve. Fuel (kWh) and CO2 (g)
//! per vehicle are power-law regressions on link speed, calibrated in miles
//! and mi/h:
//!
//! ```text
//! t(x) = t_ff * (1 + alpha * (x / Q)^beta)        minutes
//! u(x) = length / t(x)                             mi/h
//! f(x) = length * 14.58 * u(x)^-0.6253             kWh
//! e(x) = length * 3158  * u(x)^-0.56               g CO2
//! ```
//!
//! All three are strictly increasing in flow when `alpha > 0`.

use core::ops::{Add, AddAssign};

use crate::flow::FlowState;
use crate::network::{Link, Network, VehicleClass};
use crate::{Error, Result};

pub const FUEL_COEFF: f64 = 14.58;
pub const FUEL_EXP: f64 = -0.6253;
pub const CO2_COEFF: f64 = 3158.0;
pub const CO2_EXP: f64 = -0.56;

/// Per-vehicle costs of one link at a given flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkCosts {
    /// minutes
    pub travel_time: f64,
    /// mi/h
    pub speed: f64,
    /// kWh
    pub fuel: f64,
    /// g CO2
    pub emissions: f64,
}

impl LinkCosts {
    /// Evaluates the cost equations directly, with no connector handling.
    pub fn evaluate(link: &Link, flow: f64) -> Result<Self> {
        check_flow(flow)?;
        Ok(Self::evaluate_unchecked(link, flow))
    }

    fn evaluate_unchecked(link: &Link, flow: f64) -> Self {
        let travel_time = time_unchecked(link, flow);
        let speed = link.length / (travel_time / 60.0);
        LinkCosts {
            travel_time,
            speed,
            fuel: link.length * FUEL_COEFF * libm::pow(speed, FUEL_EXP),
            emissions: link.length * CO2_COEFF * libm::pow(speed, CO2_EXP),
        }
    }

    pub fn for_class(&self, class: VehicleClass) -> f64 {
        match class {
            VehicleClass::TimeRouting => self.travel_time,
            VehicleClass::EmissionsRouting => self.emissions,
            VehicleClass::FuelRouting => self.fuel,
        }
    }
}

fn check_flow(flow: f64) -> Result<()> {
    if flow >= 0.0 && flow.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidFlow(flow))
    }
}

fn time_unchecked(link: &Link, flow: f64) -> f64 {
    let ratio = flow / link.capacity;
    link.free_flow_time * (1.0 + link.alpha * libm::pow(ratio, link.beta))
}

/// BPR travel time in minutes.
pub fn bpr_time(link: &Link, flow: f64) -> Result<f64> {
    check_flow(flow)?;
    Ok(time_unchecked(link, flow))
}

/// Link speed in mi/h.
pub fn speed(link: &Link, flow: f64) -> Result<f64> {
    Ok(LinkCosts::evaluate(link, flow)?.speed)
}

/// Fuel (energy) consumption per vehicle in kWh.
pub fn fuel(link: &Link, flow: f64) -> Result<f64> {
    Ok(LinkCosts::evaluate(link, flow)?.fuel)
}

/// CO2 emissions per vehicle in grams.
pub fn emissions(link: &Link, flow: f64) -> Result<f64> {
    Ok(LinkCosts::evaluate(link, flow)?.emissions)
}

/// The cost a driver of `class` minimizes: minutes, grams or kWh.
pub fn class_cost(link: &Link, flow: f64, class: VehicleClass) -> Result<f64> {
    match class {
        VehicleClass::TimeRouting => bpr_time(link, flow),
        VehicleClass::EmissionsRouting => emissions(link, flow),
        VehicleClass::FuelRouting => fuel(link, flow),
    }
}

/// How a network turns link flows into costs.
///
/// Links shorter than `connector_length` miles are zone connectors: the
/// speed regressions are meaningless there, so they carry no fuel or
/// emissions and a flow-independent travel time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    pub connector_length: f64,
    /// Fixed connector time in minutes; `None` uses the link's own
    /// free-flow time.
    pub connector_time: Option<f64>,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            connector_length: 1e-3,
            connector_time: None,
        }
    }
}

impl CostModel {
    pub fn is_connector(&self, link: &Link) -> bool {
        link.length < self.connector_length
    }

    /// Link costs with the connector rule applied. `flow` must already be
    /// known to be nonnegative.
    pub fn link_costs(&self, link: &Link, flow: f64) -> LinkCosts {
        if self.is_connector(link) {
            let travel_time = self.connector_time.unwrap_or(link.free_flow_time);
            LinkCosts {
                travel_time,
                speed: link.length / (travel_time / 60.0),
                fuel: 0.0,
                emissions: 0.0,
            }
        } else {
            LinkCosts::evaluate_unchecked(link, flow)
        }
    }

    pub fn class_cost(&self, link: &Link, flow: f64, class: VehicleClass) -> f64 {
        if self.is_connector(link) {
            return self.link_costs(link, flow).for_class(class);
        }
        match class {
            VehicleClass::TimeRouting => time_unchecked(link, flow),
            _ => LinkCosts::evaluate_unchecked(link, flow).for_class(class),
        }
    }
}

/// Flow-weighted totals over a set of links.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SystemMetrics {
    /// Total system emissions, g CO2.
    pub tse: f64,
    /// Total system fuel consumption, kWh.
    pub tsfc: f64,
    /// Total system travel time, vehicle-minutes.
    pub tstt: f64,
}

impl Add for SystemMetrics {
    type Output = SystemMetrics;
    fn add(self, rhs: Self) -> Self {
        SystemMetrics {
            tse: self.tse + rhs.tse,
            tsfc: self.tsfc + rhs.tsfc,
            tstt: self.tstt + rhs.tstt,
        }
    }
}

impl AddAssign for SystemMetrics {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SystemMetrics {
    /// Contribution of a single link carrying `flow`.
    pub fn of_link(model: &CostModel, link: &Link, flow: f64) -> Self {
        if flow == 0.0 {
            return SystemMetrics::default();
        }
        let c = model.link_costs(link, flow);
        SystemMetrics {
            tse: c.emissions * flow,
            tsfc: c.fuel * flow,
            tstt: c.travel_time * flow,
        }
    }
}

/// TSE, TSFC and TSTT of a flow state. Connectors add travel time only.
pub fn system_metrics(net: &Network, state: &FlowState) -> Result<SystemMetrics> {
    if state.link_count() != net.link_count() {
        return Err(Error::StateMismatch {
            expected: net.link_count(),
            found: state.link_count(),
        });
    }
    let model = net.cost_model();
    let mut total = SystemMetrics::default();
    for (link, &x) in net.links().iter().zip(state.aggregate()) {
        check_flow(x)?;
        total += SystemMetrics::of_link(model, link, x);
    }
    Ok(total)
}
