//! Two parallel links between one origin and one destination.
//!
//! Link 1 is fixed; link 2 shares its BPR parameters but has twice the
//! capacity and a variable length and free-flow speed. 4000 veh/h travel
//! from A to B.

use alloc::vec;

use crate::cost::class_cost;
use crate::demand::DemandTable;
use crate::network::{Link, LinkId, Network, NodeId, VehicleClass};

pub const NODE_A: NodeId = NodeId(1);
pub const NODE_B: NodeId = NodeId(2);
pub const DEMAND: f64 = 4000.0;
pub const LINK2_LENGTH_RANGE: (f64, f64) = (5.0, 15.0);
pub const LINK2_SPEED_RANGE: (f64, f64) = (30.0, 60.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLinkScenario {
    /// miles
    pub link2_length: f64,
    /// mi/h
    pub link2_free_flow_speed: f64,
}

impl TwoLinkScenario {
    /// Link 2 shorter (5 mi) but slower (30 mi/h) than link 1.
    pub fn demo() -> Self {
        TwoLinkScenario {
            link2_length: 5.0,
            link2_free_flow_speed: 30.0,
        }
    }

    pub fn in_range(&self) -> bool {
        (LINK2_LENGTH_RANGE.0..=LINK2_LENGTH_RANGE.1).contains(&self.link2_length)
            && (LINK2_SPEED_RANGE.0..=LINK2_SPEED_RANGE.1).contains(&self.link2_free_flow_speed)
    }

    pub fn link1(&self) -> Link {
        Link::from_speed(LinkId(1), NODE_A, NODE_B, 1000.0, 10.0, 45.0, 0.15, 4.0)
    }

    pub fn link2(&self) -> Link {
        Link::from_speed(
            LinkId(2),
            NODE_A,
            NODE_B,
            2000.0,
            self.link2_length,
            self.link2_free_flow_speed,
            0.15,
            4.0,
        )
    }

    pub fn network(&self) -> Network {
        Network::new(
            vec![NODE_A, NODE_B],
            vec![self.link1(), self.link2()],
            vec![NODE_A, NODE_B],
            NODE_A,
        )
    }

    /// All 4000 veh/h in one class.
    pub fn demand(&self, class: VehicleClass) -> DemandTable {
        let mut d = DemandTable::new();
        d.add(NODE_A, NODE_B, class, DEMAND)
            .expect("constant demand is valid");
        d
    }
}

/// Single-class equilibrium split of `demand` over two parallel links.
///
/// Bisects on the link 1 flow for the root of
/// `cost(link1, x1) - cost(link2, demand - x1)`, which is increasing in
/// `x1`. If one link is cheaper even when carrying everything, all demand
/// goes there. Bisection runs until the bracket cannot shrink in `f64`.
pub fn two_link_oracle(link1: &Link, link2: &Link, demand: f64, class: VehicleClass) -> (f64, f64) {
    let diff = |x1: f64| {
        let x2 = (demand - x1).max(0.0);
        class_cost(link1, x1, class).expect("nonnegative flow")
            - class_cost(link2, x2, class).expect("nonnegative flow")
    };
    if diff(0.0) >= 0.0 {
        return (0.0, demand);
    }
    if diff(demand) <= 0.0 {
        return (demand, 0.0);
    }
    let (mut lo, mut hi) = (0.0, demand);
    let (mut g_lo, mut g_hi) = (diff(lo), diff(hi));
    loop {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let g = diff(mid);
        if g == 0.0 {
            return (mid, demand - mid);
        }
        if g < 0.0 {
            lo = mid;
            g_lo = g;
        } else {
            hi = mid;
            g_hi = g;
        }
    }
    let x1 = if g_lo.abs() <= g_hi.abs() { lo } else { hi };
    (x1, demand - x1)
}
