//! One-to-all shortest paths under class costs.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::flow::FlowState;
use crate::network::{Network, NodeId, VehicleClass};
use crate::{Error, Result};

/// Shortest-path labels and predecessor links from one origin.
#[derive(Debug, Clone, PartialEq)]
pub struct ShortestPathTree {
    pub origin: NodeId,
    pub class: VehicleClass,
    /// Cost label per dense node index; `INFINITY` when unreachable.
    pub labels: Vec<f64>,
    /// Dense index of the link entering each node on its shortest path.
    pub predecessors: Vec<Option<usize>>,
}

impl ShortestPathTree {
    pub fn label(&self, net: &Network, node: NodeId) -> Option<f64> {
        net.node_index(node).map(|i| self.labels[i])
    }

    /// Link indices from the origin to `node`, in travel order.
    pub fn path_to(&self, net: &Network, node: NodeId) -> Option<Vec<usize>> {
        let mut at = net.node_index(node)?;
        if !self.labels[at].is_finite() {
            return None;
        }
        let mut path = Vec::new();
        while let Some(li) = self.predecessors[at] {
            path.push(li);
            at = net.endpoints(li)?.0;
        }
        path.reverse();
        Some(path)
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    cost: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on cost, then on node index
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Reusable Dijkstra buffers.
#[derive(Debug, Default)]
pub(crate) struct Dijkstra {
    pub labels: Vec<f64>,
    pub pred: Vec<Option<usize>>,
    /// Nodes in the order they were settled.
    pub order: Vec<usize>,
    settled: Vec<bool>,
    heap: BinaryHeap<Entry>,
}

impl core::fmt::Debug for Entry {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "({}, {})", self.node, self.cost)
    }
}

impl Dijkstra {
    /// Label-setting search from dense node `origin` with one cost per link.
    ///
    /// Nodes below the first-through node are settled but not expanded,
    /// except for the origin itself. Equal-cost alternatives keep the
    /// entering link with the smallest external id.
    pub fn run(&mut self, net: &Network, link_costs: &[f64], origin: usize) {
        let n = net.node_count();
        self.labels.clear();
        self.labels.resize(n, f64::INFINITY);
        self.pred.clear();
        self.pred.resize(n, None);
        self.settled.clear();
        self.settled.resize(n, false);
        self.order.clear();
        self.heap.clear();

        let links = net.links();
        self.labels[origin] = 0.0;
        self.heap.push(Entry {
            cost: 0.0,
            node: origin,
        });
        while let Some(Entry { cost, node }) = self.heap.pop() {
            if self.settled[node] || cost > self.labels[node] {
                continue;
            }
            self.settled[node] = true;
            self.order.push(node);
            if node != origin && !net.is_through(node) {
                continue;
            }
            for &li in net.out_links(node) {
                let Some((_, head)) = net.endpoints(li) else {
                    continue;
                };
                if self.settled[head] {
                    continue;
                }
                let cand = cost + link_costs[li];
                let better = match cand.partial_cmp(&self.labels[head]) {
                    Some(Ordering::Less) => true,
                    Some(Ordering::Equal) => {
                        self.pred[head].is_some_and(|p| links[li].id < links[p].id)
                    }
                    _ => false,
                };
                if better {
                    self.labels[head] = cand;
                    self.pred[head] = Some(li);
                    self.heap.push(Entry {
                        cost: cand,
                        node: head,
                    });
                }
            }
        }
    }
}

/// Class cost of every link at the state's aggregate flow.
pub(crate) fn class_costs_into(
    net: &Network,
    aggregate: &[f64],
    class: VehicleClass,
    out: &mut Vec<f64>,
) {
    let model = net.cost_model();
    out.clear();
    out.extend(
        net.links()
            .iter()
            .zip(aggregate)
            .map(|(l, &x)| model.class_cost(l, x, class)),
    );
}

/// Exact shortest-path tree from `origin` for `class`, with link costs
/// evaluated at the aggregate flow of `state`.
pub fn shortest_paths(
    net: &Network,
    state: &FlowState,
    origin: NodeId,
    class: VehicleClass,
) -> Result<ShortestPathTree> {
    if state.link_count() != net.link_count() {
        return Err(Error::StateMismatch {
            expected: net.link_count(),
            found: state.link_count(),
        });
    }
    let Some(oi) = net.node_index(origin).filter(|_| net.is_zone(origin)) else {
        return Err(Error::NotAZone(origin));
    };
    if let Some(&x) = state
        .aggregate()
        .iter()
        .find(|x| !(**x >= 0.0 && x.is_finite()))
    {
        return Err(Error::InvalidFlow(x));
    }
    let mut costs = vec![];
    class_costs_into(net, state.aggregate(), class, &mut costs);
    let mut d = Dijkstra::default();
    d.run(net, &costs, oi);
    Ok(ShortestPathTree {
        origin,
        class,
        labels: d.labels,
        predecessors: d.pred,
    })
}
