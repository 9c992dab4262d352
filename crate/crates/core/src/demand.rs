//! Origin-destination demand per vehicle class.

use alloc::collections::BTreeMap;

use crate::network::{NodeId, VehicleClass};
use crate::{Error, Result};

/// Per-class OD trip rates in veh/h.
///
/// Entries are kept in (origin, destination, class) order so that every sum
/// over the table is taken in the same order and is reproducible bit for
/// bit. Intrazonal entries never enter the table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DemandTable {
    entries: BTreeMap<(NodeId, NodeId, VehicleClass), f64>,
}

impl DemandTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `rate` to an entry. Returns `Ok(false)` when the entry is
    /// intrazonal and was dropped.
    pub fn add(
        &mut self,
        origin: NodeId,
        destination: NodeId,
        class: VehicleClass,
        rate: f64,
    ) -> Result<bool> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::InvalidDemand {
                origin,
                destination,
                rate,
            });
        }
        if origin == destination {
            return Ok(false);
        }
        *self
            .entries
            .entry((origin, destination, class))
            .or_insert(0.0) += rate;
        Ok(true)
    }

    pub fn get(&self, origin: NodeId, destination: NodeId, class: VehicleClass) -> f64 {
        self.entries
            .get(&(origin, destination, class))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, NodeId, VehicleClass, f64)> + '_ {
        self.entries.iter().map(|(&(o, d, c), &r)| (o, d, c, r))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self, class: VehicleClass) -> f64 {
        self.iter().filter(|e| e.2 == class).map(|e| e.3).sum()
    }

    pub fn grand_total(&self) -> f64 {
        self.iter().map(|e| e.3).sum()
    }

    /// Whether any positive demand of `class` exists.
    pub fn has_class(&self, class: VehicleClass) -> bool {
        self.iter().any(|e| e.2 == class && e.3 > 0.0)
    }
}

/// Splits a time-routing table into `(1 - p)` time-routing and `p`
/// eco-routing demand, entry by entry. Zero-rate parts are not stored, so
/// `p = 0` returns the base table unchanged.
pub fn split_demand(
    base: &DemandTable,
    eco_fraction: f64,
    eco_class: VehicleClass,
) -> Result<DemandTable> {
    if !(0.0..=1.0).contains(&eco_fraction) {
        return Err(Error::FractionOutOfRange(eco_fraction));
    }
    if !eco_class.is_eco() {
        return Err(Error::NotAnEcoClass(eco_class));
    }
    let mut out = DemandTable::new();
    for (o, d, c, rate) in base.iter() {
        if c != VehicleClass::TimeRouting {
            return Err(Error::BaseNotTimeRouting);
        }
        let eco = eco_fraction * rate;
        let time = (1.0 - eco_fraction) * rate;
        if time > 0.0 {
            out.entries.insert((o, d, VehicleClass::TimeRouting), time);
        }
        if eco > 0.0 {
            out.entries.insert((o, d, eco_class), eco);
        }
    }
    Ok(out)
}
