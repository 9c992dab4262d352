//! Network topology, links and vehicle classes.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::cost::CostModel;

/// External node identifier, as it appears in input files (usually 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "node {}", self.0)
    }
}

/// External link identifier. Parallel links between the same node pair are
/// told apart by this id, and it is also the shortest-path tie-breaker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkId(pub u32);

impl fmt::Display for LinkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "link {}", self.0)
    }
}

/// The route-choice objective of a driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VehicleClass {
    /// Minimizes travel time.
    TimeRouting,
    /// Minimizes CO2 emissions.
    EmissionsRouting,
    /// Minimizes fuel (energy) consumption.
    FuelRouting,
}

impl VehicleClass {
    pub const ALL: [VehicleClass; 3] = [
        VehicleClass::TimeRouting,
        VehicleClass::EmissionsRouting,
        VehicleClass::FuelRouting,
    ];

    /// Dense index, used for per-class arrays.
    pub const fn index(self) -> usize {
        match self {
            VehicleClass::TimeRouting => 0,
            VehicleClass::EmissionsRouting => 1,
            VehicleClass::FuelRouting => 2,
        }
    }

    /// Single-letter code: `t`, `e` or `f`.
    pub const fn code(self) -> char {
        match self {
            VehicleClass::TimeRouting => 't',
            VehicleClass::EmissionsRouting => 'e',
            VehicleClass::FuelRouting => 'f',
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "t" | "time" => Some(VehicleClass::TimeRouting),
            "e" | "emissions" => Some(VehicleClass::EmissionsRouting),
            "f" | "fuel" => Some(VehicleClass::FuelRouting),
            _ => None,
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            VehicleClass::TimeRouting => "time",
            VehicleClass::EmissionsRouting => "emissions",
            VehicleClass::FuelRouting => "fuel",
        }
    }

    pub const fn is_eco(self) -> bool {
        !matches!(self, VehicleClass::TimeRouting)
    }
}

impl fmt::Display for VehicleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Columns carried through from input files that no cost function reads.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LinkAttrs {
    pub speed_limit: f64,
    pub toll: f64,
    pub link_type: i64,
}

/// A directed road link.
///
/// Units: capacity in veh/h, length in miles, free-flow time in minutes.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub id: LinkId,
    pub tail: NodeId,
    pub head: NodeId,
    pub capacity: f64,
    pub length: f64,
    pub free_flow_time: f64,
    pub alpha: f64,
    pub beta: f64,
    pub attrs: LinkAttrs,
}

impl Link {
    /// Builds a link from its free-flow speed (mi/h) rather than its
    /// free-flow time.
    #[allow(clippy::too_many_arguments)]
    pub fn from_speed(
        id: LinkId,
        tail: NodeId,
        head: NodeId,
        capacity: f64,
        length: f64,
        free_flow_speed: f64,
        alpha: f64,
        beta: f64,
    ) -> Self {
        Link {
            id,
            tail,
            head,
            capacity,
            length,
            free_flow_time: length / free_flow_speed * 60.0,
            alpha,
            beta,
            attrs: LinkAttrs::default(),
        }
    }

    /// Free-flow speed in mi/h.
    pub fn free_flow_speed(&self) -> f64 {
        self.length / (self.free_flow_time / 60.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subject {
    Link(LinkId),
    Node(NodeId),
    Zone(NodeId),
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Link(id) => id.fmt(f),
            Subject::Node(id) => id.fmt(f),
            Subject::Zone(id) => write!(f, "zone {}", id.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiagnosticKind {
    NonPositiveCapacity(f64),
    InvalidLength(f64),
    NonPositiveFreeFlowTime(f64),
    NegativeAlpha(f64),
    BetaBelowOne(f64),
    UnknownTail(NodeId),
    UnknownHead(NodeId),
    DuplicateLinkId,
    DuplicateNodeId,
    ZoneNotANode,
    DuplicateZone,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostic {
    pub subject: Subject,
    pub kind: DiagnosticKind,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.subject)?;
        match self.kind {
            DiagnosticKind::NonPositiveCapacity(v) => write!(f, "capacity {v} is not positive"),
            DiagnosticKind::InvalidLength(v) => write!(f, "length {v} is negative or not finite"),
            DiagnosticKind::NonPositiveFreeFlowTime(v) => {
                write!(f, "free-flow time {v} is not positive")
            }
            DiagnosticKind::NegativeAlpha(v) => write!(f, "alpha {v} is negative"),
            DiagnosticKind::BetaBelowOne(v) => write!(f, "beta {v} is below 1"),
            DiagnosticKind::UnknownTail(n) => write!(f, "tail {n} is not in the node set"),
            DiagnosticKind::UnknownHead(n) => write!(f, "head {n} is not in the node set"),
            DiagnosticKind::DuplicateLinkId => f.write_str("id used by more than one link"),
            DiagnosticKind::DuplicateNodeId => f.write_str("id listed more than once"),
            DiagnosticKind::ZoneNotANode => f.write_str("zone is not in the node set"),
            DiagnosticKind::DuplicateZone => f.write_str("zone listed more than once"),
        }
    }
}

/// A road network with zones and a first-through-node restriction.
///
/// Nodes are renumbered densely on construction; external ids are kept for
/// all input, output and diagnostics. The network is immutable afterwards.
/// Construction never fails, so that a malformed network can still be
/// inspected with [`validate_network`].
#[derive(Debug, Clone)]
pub struct Network {
    nodes: Vec<NodeId>,
    links: Vec<Link>,
    zones: Vec<NodeId>,
    first_through_node: NodeId,
    cost_model: CostModel,
    node_index: BTreeMap<NodeId, usize>,
    link_index: BTreeMap<LinkId, usize>,
    endpoints: Vec<Option<(usize, usize)>>,
    // forward star, each node's links sorted by link id
    out_start: Vec<usize>,
    out_links: Vec<usize>,
    zone_flags: Vec<bool>,
}

impl Network {
    /// Nodes whose external id is strictly below `first_through_node` may
    /// start or end a path but are never passed through.
    pub fn new(
        nodes: Vec<NodeId>,
        links: Vec<Link>,
        zones: Vec<NodeId>,
        first_through_node: NodeId,
    ) -> Self {
        let mut node_index = BTreeMap::new();
        for (i, &n) in nodes.iter().enumerate() {
            node_index.entry(n).or_insert(i);
        }
        let mut link_index = BTreeMap::new();
        for (i, l) in links.iter().enumerate() {
            link_index.entry(l.id).or_insert(i);
        }
        let endpoints: Vec<_> = links
            .iter()
            .map(|l| Some((*node_index.get(&l.tail)?, *node_index.get(&l.head)?)))
            .collect();

        let mut degree = vec![0usize; nodes.len() + 1];
        for &(t, _) in endpoints.iter().flatten() {
            degree[t + 1] += 1;
        }
        for i in 0..nodes.len() {
            degree[i + 1] += degree[i];
        }
        let out_start = degree;
        let mut fill = out_start.clone();
        let mut out_links = vec![0usize; out_start[nodes.len()]];
        for (li, ends) in endpoints.iter().enumerate() {
            if let Some((t, _)) = *ends {
                out_links[fill[t]] = li;
                fill[t] += 1;
            }
        }
        for n in 0..nodes.len() {
            out_links[out_start[n]..out_start[n + 1]].sort_by_key(|&li| links[li].id);
        }

        let mut zone_flags = vec![false; nodes.len()];
        for z in &zones {
            if let Some(&i) = node_index.get(z) {
                zone_flags[i] = true;
            }
        }

        Network {
            nodes,
            links,
            zones,
            first_through_node,
            cost_model: CostModel::default(),
            node_index,
            link_index,
            endpoints,
            out_start,
            out_links,
            zone_flags,
        }
    }

    pub fn with_cost_model(mut self, cost_model: CostModel) -> Self {
        self.cost_model = cost_model;
        self
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn zones(&self) -> &[NodeId] {
        &self.zones
    }

    pub fn first_through_node(&self) -> NodeId {
        self.first_through_node
    }

    pub fn cost_model(&self) -> &CostModel {
        &self.cost_model
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    /// Dense index of an external node id.
    pub fn node_index(&self, id: NodeId) -> Option<usize> {
        self.node_index.get(&id).copied()
    }

    pub fn link_index(&self, id: LinkId) -> Option<usize> {
        self.link_index.get(&id).copied()
    }

    pub fn is_zone(&self, id: NodeId) -> bool {
        self.node_index(id).is_some_and(|i| self.zone_flags[i])
    }

    /// Dense (tail, head) of a link, `None` if either endpoint is unknown.
    pub fn endpoints(&self, link: usize) -> Option<(usize, usize)> {
        self.endpoints[link]
    }

    /// Outgoing link indices of a dense node, ordered by link id.
    pub fn out_links(&self, node: usize) -> &[usize] {
        &self.out_links[self.out_start[node]..self.out_start[node + 1]]
    }

    /// Whether a path may continue through this dense node.
    pub fn is_through(&self, node: usize) -> bool {
        self.nodes[node] >= self.first_through_node
    }
}

/// Checks every link and network invariant. An empty list means the network
/// is usable by the solver.
pub fn validate_network(net: &Network) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut push = |subject, kind| out.push(Diagnostic { subject, kind });

    let mut seen = BTreeMap::new();
    for &n in &net.nodes {
        if seen.insert(n, ()).is_some() {
            push(Subject::Node(n), DiagnosticKind::DuplicateNodeId);
        }
    }

    let mut seen = BTreeMap::new();
    for (i, l) in net.links.iter().enumerate() {
        let s = Subject::Link(l.id);
        if seen.insert(l.id, ()).is_some() {
            push(s, DiagnosticKind::DuplicateLinkId);
        }
        if !(l.capacity > 0.0 && l.capacity.is_finite()) {
            push(s, DiagnosticKind::NonPositiveCapacity(l.capacity));
        }
        if !(l.length >= 0.0 && l.length.is_finite()) {
            push(s, DiagnosticKind::InvalidLength(l.length));
        }
        if !(l.free_flow_time > 0.0 && l.free_flow_time.is_finite()) {
            push(s, DiagnosticKind::NonPositiveFreeFlowTime(l.free_flow_time));
        }
        if !(l.alpha >= 0.0 && l.alpha.is_finite()) {
            push(s, DiagnosticKind::NegativeAlpha(l.alpha));
        }
        if !(l.beta >= 1.0 && l.beta.is_finite()) {
            push(s, DiagnosticKind::BetaBelowOne(l.beta));
        }
        if net.endpoints[i].is_none() {
            if net.node_index(l.tail).is_none() {
                push(s, DiagnosticKind::UnknownTail(l.tail));
            }
            if net.node_index(l.head).is_none() {
                push(s, DiagnosticKind::UnknownHead(l.head));
            }
        }
    }

    let mut seen = BTreeMap::new();
    for &z in &net.zones {
        if net.node_index(z).is_none() {
            push(Subject::Zone(z), DiagnosticKind::ZoneNotANode);
        }
        if seen.insert(z, ()).is_some() {
            push(Subject::Zone(z), DiagnosticKind::DuplicateZone);
        }
    }
    out
}
