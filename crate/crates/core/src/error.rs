use alloc::vec::Vec;
use core::fmt;

use crate::network::{Diagnostic, NodeId, VehicleClass};

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A cost function was evaluated at a negative or non-finite flow.
    InvalidFlow(f64),
    /// Eco-routing fraction outside `[0, 1]`.
    FractionOutOfRange(f64),
    /// `split_demand` was given a base table holding non-time-routing demand.
    BaseNotTimeRouting,
    /// `split_demand` was asked to split into the time-routing class.
    NotAnEcoClass(VehicleClass),
    /// A demand rate that is negative or not finite.
    InvalidDemand {
        origin: NodeId,
        destination: NodeId,
        rate: f64,
    },
    /// Demand references a node that is not a zone of the network.
    NotAZone(NodeId),
    /// Positive demand towards a destination no path reaches.
    Unreachable {
        origin: NodeId,
        destination: NodeId,
        class: VehicleClass,
    },
    /// The network violates a structural invariant.
    InvalidNetwork(Vec<Diagnostic>),
    InvalidConfig(&'static str),
    /// A flow state whose link count does not match the network.
    StateMismatch {
        expected: usize,
        found: usize,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidFlow(x) => write!(f, "flow must be finite and nonnegative, got {x}"),
            Error::FractionOutOfRange(p) => {
                write!(f, "eco-routing fraction must lie in [0, 1], got {p}")
            }
            Error::BaseNotTimeRouting => {
                f.write_str("base demand for a split must contain only time-routing entries")
            }
            Error::NotAnEcoClass(c) => write!(f, "{c} is not an eco-routing class"),
            Error::InvalidDemand {
                origin,
                destination,
                rate,
            } => write!(
                f,
                "invalid demand rate {rate} from {origin} to {destination}"
            ),
            Error::NotAZone(n) => write!(f, "node {n} is not a zone"),
            Error::Unreachable {
                origin,
                destination,
                class,
            } => write!(
                f,
                "destination {destination} is unreachable from {origin} for {class} demand"
            ),
            Error::InvalidNetwork(diags) => {
                write!(f, "invalid network ({} problems)", diags.len())?;
                for d in diags.iter().take(5) {
                    write!(f, "; {d}")?;
                }
                Ok(())
            }
            Error::InvalidConfig(msg) => write!(f, "invalid solver configuration: {msg}"),
            Error::StateMismatch { expected, found } => {
                write!(f, "flow state has {found} links, network has {expected}")
            }
        }
    }
}

impl core::error::Error for Error {}
