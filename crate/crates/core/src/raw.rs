//! Node/edge description of a grid before it is turned into links.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Source,
    Interconnection,
    Sink,
    /// A junction with an implicit attached load (a substation acting as a load).
    InterconnectionWithSink,
}

impl NodeKind {
    pub fn is_sink_bearing(self) -> bool {
        matches!(self, NodeKind::Sink | NodeKind::InterconnectionWithSink)
    }

    /// Junctions are the nodes that survive into the links-only model.
    pub fn is_junction(self) -> bool {
        matches!(self, NodeKind::Interconnection | NodeKind::InterconnectionWithSink)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawNode {
    pub id: u32,
    pub kind: NodeKind,
    pub capacity: Option<f64>,
    pub demand: Option<f64>,
}

impl RawNode {
    pub fn source(id: u32, capacity: f64) -> Self {
        RawNode { id, kind: NodeKind::Source, capacity: Some(capacity), demand: None }
    }

    pub fn interconnection(id: u32) -> Self {
        RawNode { id, kind: NodeKind::Interconnection, capacity: None, demand: None }
    }

    pub fn sink(id: u32, demand: f64) -> Self {
        RawNode { id, kind: NodeKind::Sink, capacity: None, demand: Some(demand) }
    }

    pub fn interconnection_with_sink(id: u32, demand: f64) -> Self {
        RawNode { id, kind: NodeKind::InterconnectionWithSink, capacity: None, demand: Some(demand) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawEdge {
    pub id: String,
    pub a: u32,
    pub b: u32,
    pub multiplicity: u32,
    /// Ids of co-located edges folded into this one by [`ValidatedRawNetwork::merge_parallel`].
    /// Empty means just `id`.
    pub merged: Vec<String>,
}

impl RawEdge {
    pub fn new(id: impl Into<String>, a: u32, b: u32) -> Self {
        RawEdge { id: id.into(), a, b, multiplicity: 1, merged: Vec::new() }
    }

    pub fn with_multiplicity(mut self, multiplicity: u32) -> Self {
        self.multiplicity = multiplicity;
        self
    }

    /// All raw edge ids this edge stands for.
    pub fn constituents(&self) -> Vec<String> {
        if self.merged.is_empty() {
            vec![self.id.clone()]
        } else {
            self.merged.clone()
        }
    }

    fn pair(&self) -> (u32, u32) {
        (self.a.min(self.b), self.a.max(self.b))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawNetwork {
    pub name: String,
    pub nodes: Vec<RawNode>,
    pub edges: Vec<RawEdge>,
}

/// Identifier of a raw network element, used for provenance.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RawId {
    Node(u32),
    Edge(String),
}

impl fmt::Display for RawId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RawId::Node(id) => write!(f, "n{id}"),
            RawId::Edge(id) => write!(f, "e{id}"),
        }
    }
}

/// Orders edge ids numerically when both are numbers, lexically otherwise.
pub fn cmp_edge_ids(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

/// A raw network whose invariants have been checked. Nodes are sorted by id
/// and addressed by a dense index; the external ids stay available.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedRawNetwork {
    name: String,
    nodes: Vec<RawNode>,
    edges: Vec<RawEdge>,
    index: HashMap<u32, usize>,
}

impl ValidatedRawNetwork {
    pub fn validate(net: RawNetwork) -> Result<Self> {
        if net.nodes.is_empty() {
            return Err(Error::NoNodes);
        }
        let mut nodes = net.nodes;
        let mut seen = HashSet::new();
        for node in &nodes {
            if !seen.insert(node.id) {
                return Err(Error::DuplicateNode(node.id));
            }
            check_attributes(node)?;
        }
        nodes.sort_by_key(|n| n.id);
        let index: HashMap<u32, usize> = nodes.iter().enumerate().map(|(i, n)| (n.id, i)).collect();

        let mut edge_ids = HashSet::new();
        for edge in &net.edges {
            if !edge_ids.insert(edge.id.as_str()) {
                return Err(Error::DuplicateEdge(edge.id.clone()));
            }
            for end in [edge.a, edge.b] {
                if !index.contains_key(&end) {
                    return Err(Error::DanglingEndpoint { edge: edge.id.clone(), node: end });
                }
            }
            if edge.a == edge.b {
                return Err(Error::SelfLoop(edge.a));
            }
            if edge.multiplicity == 0 {
                return Err(Error::BadMultiplicity(edge.id.clone()));
            }
        }
        Ok(ValidatedRawNetwork { name: net.name, nodes, edges: net.edges, index })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn nodes(&self) -> &[RawNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[RawEdge] {
        &self.edges
    }

    pub fn node(&self, id: u32) -> Option<&RawNode> {
        self.index.get(&id).map(|&i| &self.nodes[i])
    }

    pub fn node_index(&self, id: u32) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn into_raw(self) -> RawNetwork {
        RawNetwork { name: self.name, nodes: self.nodes, edges: self.edges }
    }

    pub fn sink_ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.nodes.iter().filter(|n| n.kind.is_sink_bearing()).map(|n| n.id)
    }

    pub fn source_ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Source).map(|n| n.id)
    }

    /// Collapses co-located parallel edges into one edge per endpoint pair.
    /// The surviving edge keeps the smallest id and lists every merged id.
    pub fn merge_parallel(&self) -> ValidatedRawNetwork {
        let mut groups: BTreeMap<(u32, u32), Vec<&RawEdge>> = BTreeMap::new();
        for edge in &self.edges {
            groups.entry(edge.pair()).or_default().push(edge);
        }
        let mut edges: Vec<RawEdge> = groups
            .into_values()
            .map(|group| {
                let mut ids: Vec<String> = group.iter().flat_map(|e| e.constituents()).collect();
                ids.sort_by(|a, b| cmp_edge_ids(a, b));
                ids.dedup();
                let first = group
                    .iter()
                    .min_by(|x, y| cmp_edge_ids(&x.id, &y.id))
                    .expect("non-empty group");
                RawEdge {
                    id: ids[0].clone(),
                    a: first.a,
                    b: first.b,
                    multiplicity: 1,
                    merged: if ids.len() > 1 { ids } else { Vec::new() },
                }
            })
            .collect();
        edges.sort_by(|x, y| cmp_edge_ids(&x.id, &y.id));
        ValidatedRawNetwork {
            name: self.name.clone(),
            nodes: self.nodes.clone(),
            edges,
            index: self.index.clone(),
        }
    }

    /// The sub-grid induced by `keep`; edges with an endpoint outside are dropped.
    pub fn induced(&self, keep: &HashSet<u32>) -> ValidatedRawNetwork {
        let nodes: Vec<RawNode> = self.nodes.iter().filter(|n| keep.contains(&n.id)).cloned().collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| keep.contains(&e.a) && keep.contains(&e.b))
            .cloned()
            .collect();
        let index = nodes.iter().enumerate().map(|(i, n)| (n.id, i)).collect();
        ValidatedRawNetwork { name: self.name.clone(), nodes, edges, index }
    }
}

fn check_attributes(node: &RawNode) -> Result<()> {
    let is_source = node.kind == NodeKind::Source;
    let is_sink = node.kind.is_sink_bearing();
    match (is_source, node.capacity) {
        (true, None) => return Err(Error::BadAttribute(node.id, "source without capacity")),
        (false, Some(_)) => return Err(Error::BadAttribute(node.id, "capacity on a non-source node")),
        (true, Some(c)) if !(c >= 0.0 && c.is_finite()) => {
            return Err(Error::BadAttribute(node.id, "capacity must be a nonnegative number"))
        }
        _ => {}
    }
    match (is_sink, node.demand) {
        (true, None) => Err(Error::BadAttribute(node.id, "sink without demand")),
        (false, Some(_)) => Err(Error::BadAttribute(node.id, "demand on a node without a sink")),
        (true, Some(d)) if !(d >= 0.0 && d.is_finite()) => {
            Err(Error::BadAttribute(node.id, "demand must be a nonnegative number"))
        }
        _ => Ok(()),
    }
}
