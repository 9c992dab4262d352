//! Per-class and aggregate link flows.

use alloc::vec;
use alloc::vec::Vec;

use crate::demand::DemandTable;
use crate::network::{Network, VehicleClass};

/// Link flows in veh/h, indexed by dense link index.
///
/// The aggregate is always recomputed from the class flows in t, e, f order,
/// so it equals their sum exactly as the arithmetic produces it.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    class_flows: [Vec<f64>; 3],
    aggregate: Vec<f64>,
}

impl FlowState {
    pub fn zeros(link_count: usize) -> Self {
        FlowState {
            class_flows: [
                vec![0.0; link_count],
                vec![0.0; link_count],
                vec![0.0; link_count],
            ],
            aggregate: vec![0.0; link_count],
        }
    }

    /// Builds a state from explicit class flows. Missing classes are zero.
    pub fn from_class_flows(class_flows: [Vec<f64>; 3]) -> Self {
        let n = class_flows[0].len();
        assert!(
            class_flows.iter().all(|f| f.len() == n),
            "class flow vectors differ in length"
        );
        let mut s = FlowState {
            class_flows,
            aggregate: vec![0.0; n],
        };
        s.refresh_aggregate();
        s
    }

    pub fn link_count(&self) -> usize {
        self.aggregate.len()
    }

    pub fn class(&self, class: VehicleClass) -> &[f64] {
        &self.class_flows[class.index()]
    }

    pub fn aggregate(&self) -> &[f64] {
        &self.aggregate
    }

    /// Mutable access to one class; the aggregate is refreshed when the
    /// returned guard is dropped.
    pub fn class_mut(&mut self, class: VehicleClass) -> ClassFlowsMut<'_> {
        ClassFlowsMut { state: self, class }
    }

    pub(crate) fn refresh_aggregate(&mut self) {
        let [t, e, f] = &self.class_flows;
        for (i, x) in self.aggregate.iter_mut().enumerate() {
            *x = t[i] + e[i] + f[i];
        }
    }

    /// `self <- (1 - step) * self + step * target`, per class per link.
    pub(crate) fn blend_towards(&mut self, target: &FlowState, step: f64) {
        let keep = 1.0 - step;
        for (mine, theirs) in self.class_flows.iter_mut().zip(&target.class_flows) {
            for (x, y) in mine.iter_mut().zip(theirs) {
                *x = keep * *x + step * *y;
            }
        }
        self.refresh_aggregate();
    }

    /// Largest node imbalance of any class: for every node, outflow minus
    /// inflow should equal the class demand produced there minus the demand
    /// attracted there.
    pub fn conservation_residual(&self, net: &Network, demand: &DemandTable) -> f64 {
        let n = net.node_count();
        let mut worst = 0.0f64;
        for class in VehicleClass::ALL {
            let mut balance = vec![0.0f64; n];
            for (li, &x) in self.class(class).iter().enumerate() {
                if let Some((t, h)) = net.endpoints(li) {
                    balance[t] += x;
                    balance[h] -= x;
                }
            }
            for (o, d, c, rate) in demand.iter() {
                if c != class {
                    continue;
                }
                if let (Some(oi), Some(di)) = (net.node_index(o), net.node_index(d)) {
                    balance[oi] -= rate;
                    balance[di] += rate;
                }
            }
            worst = balance.iter().fold(worst, |w, b| w.max(b.abs()));
        }
        worst
    }

    pub fn min_flow(&self) -> f64 {
        self.class_flows
            .iter()
            .flatten()
            .fold(f64::INFINITY, |m, &x| m.min(x))
    }
}

#[derive(Debug)]
pub struct ClassFlowsMut<'a> {
    state: &'a mut FlowState,
    class: VehicleClass,
}

impl core::ops::Deref for ClassFlowsMut<'_> {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.state.class_flows[self.class.index()]
    }
}

impl core::ops::DerefMut for ClassFlowsMut<'_> {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.state.class_flows[self.class.index()]
    }
}

impl Drop for ClassFlowsMut<'_> {
    fn drop(&mut self) {
        self.state.refresh_aggregate();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::VehicleClass::*;

    #[test]
    fn aggregate_tracks_class_edits() {
        let mut s = FlowState::zeros(2);
        s.class_mut(TimeRouting)[0] = 3.0;
        s.class_mut(FuelRouting)[0] = 0.25;
        s.class_mut(EmissionsRouting)[1] = 7.0;
        assert_eq!(s.aggregate(), &[3.25, 7.0]);
    }

    #[test]
    fn blend_is_convex_combination() {
        let mut a = FlowState::from_class_flows([vec![4.0, 0.0], vec![0.0; 2], vec![0.0; 2]]);
        let b = FlowState::from_class_flows([vec![0.0, 4.0], vec![0.0; 2], vec![0.0; 2]]);
        a.blend_towards(&b, 0.25);
        assert_eq!(a.class(TimeRouting), &[3.0, 1.0]);
        assert_eq!(a.aggregate(), &[3.0, 1.0]);
        a.blend_towards(&b, 1.0);
        assert_eq!(a, b);
    }
}
