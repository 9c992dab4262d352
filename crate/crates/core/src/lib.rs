//! Multiclass static traffic assignment for mixed populations of
//! time-routing and eco-routing vehicles.
//!
//! Three vehicle classes share the road network: drivers minimizing travel
//! time, drivers minimizing CO2 emissions, and drivers minimizing fuel
//! (energy) consumption. Each class sees its own per-link cost, but all costs
//! are functions of the same aggregate link flow, so the classes interact
//! through congestion. [`solve`] finds a user equilibrium with
//! all-or-nothing loading and the method of successive averages, and reports
//! the relative gap as a convergence certificate.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, experiments
//! and the command line live in the `ecoroute` companion crate.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cost;
pub mod demand;
pub mod equilibrium;
mod error;
pub mod flow;
pub mod network;
pub mod paths;
pub mod two_link;

pub use cost::{
    bpr_time, class_cost, emissions, fuel, speed, system_metrics, CostModel, LinkCosts,
    SystemMetrics,
};
pub use demand::{split_demand, DemandTable};
pub use equilibrium::{
    all_or_nothing, relative_gap, solve, solve_with, EquilibriumResult, GapRecord, SolverConfig,
    StepRule,
};
pub use error::Error;
pub use flow::FlowState;
pub use network::{
    validate_network, Diagnostic, DiagnosticKind, Link, LinkAttrs, LinkId, Network, NodeId,
    Subject, VehicleClass,
};
pub use paths::{shortest_paths, ShortestPathTree};
pub use two_link::{two_link_oracle, TwoLinkScenario};

pub type Result<T, E = Error> = core::result::Result<T, E>;
