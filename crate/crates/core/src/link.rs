//! The links-only representation.
//!
//! Sources, sinks and the edges touching them collapse into vertical links
//! (VT on the source side, VB on the sink side); edges between junctions
//! become horizontal H links. Junctions themselves never fail. The order of
//! [`LinkNetwork::elements`] fixes the bit position of every element in a
//! fault scenario.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::raw::{cmp_edge_ids, NodeKind, RawId, ValidatedRawNetwork};

pub type JunctionId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LinkKind {
    VB,
    VT,
    H,
}

impl LinkKind {
    pub fn code(self) -> u8 {
        match self {
            LinkKind::VB => 0,
            LinkKind::VT => 1,
            LinkKind::H => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<LinkKind> {
        match code {
            0 => Some(LinkKind::VB),
            1 => Some(LinkKind::VT),
            2 => Some(LinkKind::H),
            _ => None,
        }
    }
}

impl fmt::Display for LinkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LinkKind::VB => "VB",
            LinkKind::VT => "VT",
            LinkKind::H => "H",
        };
        f.write_str(s)
    }
}

/// Where an element attaches. Vertical links have one junction end (the
/// other end is the dangling source or sink); H links join two junctions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Attach {
    Terminal(JunctionId),
    Span(JunctionId, JunctionId),
}

impl Attach {
    pub fn junctions(self) -> impl Iterator<Item = JunctionId> {
        let (a, b) = match self {
            Attach::Terminal(j) => (j, None),
            Attach::Span(x, y) => (x, Some(y)),
        };
        std::iter::once(a).chain(b)
    }

    /// For a span, the end opposite `j`.
    pub fn other(self, j: JunctionId) -> Option<JunctionId> {
        match self {
            Attach::Span(x, y) if x == j => Some(y),
            Attach::Span(x, y) if y == j => Some(x),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkElement {
    pub name: String,
    pub kind: LinkKind,
    /// VT: +source capacity, VB: -sink demand, H: none.
    pub weight: Option<f64>,
    pub source_id: Option<u32>,
    pub sink_id: Option<u32>,
    pub attach: Attach,
    pub provenance: BTreeSet<RawId>,
}

impl LinkElement {
    pub fn vt(name: String, source: u32, capacity: f64, junction: JunctionId, provenance: BTreeSet<RawId>) -> Self {
        LinkElement {
            name,
            kind: LinkKind::VT,
            weight: Some(capacity),
            source_id: Some(source),
            sink_id: None,
            attach: Attach::Terminal(junction),
            provenance,
        }
    }

    pub fn vb(name: String, sink: u32, demand: f64, junction: JunctionId, provenance: BTreeSet<RawId>) -> Self {
        LinkElement {
            name,
            kind: LinkKind::VB,
            weight: Some(-demand),
            source_id: None,
            sink_id: Some(sink),
            attach: Attach::Terminal(junction),
            provenance,
        }
    }

    pub fn h(name: String, a: JunctionId, b: JunctionId, provenance: BTreeSet<RawId>) -> Self {
        LinkElement {
            name,
            kind: LinkKind::H,
            weight: None,
            source_id: None,
            sink_id: None,
            attach: Attach::Span(a, b),
            provenance,
        }
    }

    pub fn junctions(&self) -> impl Iterator<Item = JunctionId> {
        self.attach.junctions()
    }

    /// Capacity of a VT element, demand of a VB element.
    pub fn magnitude(&self) -> f64 {
        self.weight.map(f64::abs).unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkNetwork {
    junctions: BTreeSet<JunctionId>,
    elements: Vec<LinkElement>,
}

impl LinkNetwork {
    /// Builds a network from elements; the junction set is every endpoint.
    pub fn from_elements(elements: Vec<LinkElement>) -> Self {
        let junctions = elements.iter().flat_map(|e| e.junctions()).collect();
        LinkNetwork { junctions, elements }
    }

    pub fn junctions(&self) -> &BTreeSet<JunctionId> {
        &self.junctions
    }

    pub fn elements(&self) -> &[LinkElement] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &LinkElement {
        &self.elements[i]
    }

    /// M, the number of elements.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn count(&self, kind: LinkKind) -> usize {
        self.elements.iter().filter(|e| e.kind == kind).count()
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e.name == name)
    }

    pub fn find_or_err(&self, name: &str) -> Result<usize> {
        self.find(name).ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    pub fn vb_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.elements.iter().enumerate().filter(|(_, e)| e.kind == LinkKind::VB).map(|(i, _)| i)
    }

    pub fn sink_ids(&self) -> BTreeSet<u32> {
        self.elements.iter().filter_map(|e| e.sink_id).collect()
    }

    /// Capacity of every source, taken from its VT elements.
    pub fn source_capacities(&self) -> BTreeMap<u32, f64> {
        self.elements
            .iter()
            .filter_map(|e| e.source_id.map(|s| (s, e.magnitude())))
            .collect()
    }

    pub fn sink_demand(&self, sink: u32) -> Option<f64> {
        self.elements.iter().find(|e| e.sink_id == Some(sink)).map(|e| e.magnitude())
    }

    pub fn total_demand(&self) -> f64 {
        let demands: BTreeMap<u32, f64> = self
            .elements
            .iter()
            .filter_map(|e| e.sink_id.map(|s| (s, e.magnitude())))
            .collect();
        demands.values().sum()
    }

    /// Weight divided by total demand, for reports.
    pub fn normalized_weight(&self, i: usize) -> Option<f64> {
        let total = self.total_demand();
        self.elements[i].weight.map(|w| if total > 0.0 { w / total } else { w })
    }
}

/// `VT64` for a lone link, `VT761`, `VT762`, ... (or `VT76.1` when the
/// compact form would collide) for several.
fn indexed_names(prefix: &str, owner: u32, count: usize, dotted: bool) -> Vec<String> {
    if count == 1 {
        return vec![format!("{prefix}{owner}")];
    }
    (1..=count)
        .map(|k| if dotted { format!("{prefix}{owner}.{k}") } else { format!("{prefix}{owner}{k}") })
        .collect()
}

/// Converts a parallel-merged raw network into its links-only form.
#[allow(clippy::type_complexity)]
pub fn to_link_network(net: &ValidatedRawNetwork) -> Result<LinkNetwork> {
    // owner -> attachment junctions with the raw edge behind each
    let mut vt: BTreeMap<u32, Vec<(JunctionId, Vec<String>)>> = BTreeMap::new();
    // no edge list for the implicit load of a substation
    let mut vb: BTreeMap<u32, Vec<(JunctionId, Option<Vec<String>>)>> = BTreeMap::new();
    let mut h = Vec::new();

    for edge in net.edges() {
        let ka = net.node(edge.a).expect("validated").kind;
        let kb = net.node(edge.b).expect("validated").kind;
        let ids = edge.constituents();
        match (ka, kb) {
            (x, y) if x.is_junction() && y.is_junction() => h.push((edge.id.clone(), edge.a, edge.b, ids)),
            (NodeKind::Source, y) if y.is_junction() => vt.entry(edge.a).or_default().push((edge.b, ids)),
            (x, NodeKind::Source) if x.is_junction() => vt.entry(edge.b).or_default().push((edge.a, ids)),
            (NodeKind::Sink, y) if y.is_junction() => vb.entry(edge.a).or_default().push((edge.b, Some(ids))),
            (x, NodeKind::Sink) if x.is_junction() => vb.entry(edge.b).or_default().push((edge.a, Some(ids))),
            (NodeKind::Source, NodeKind::Sink) => {
                return Err(Error::IsolatedPair { source_node: edge.a, sink: edge.b })
            }
            (NodeKind::Sink, NodeKind::Source) => {
                return Err(Error::IsolatedPair { source_node: edge.b, sink: edge.a })
            }
            _ => return Err(Error::TerminalEdge(edge.id.clone())),
        }
    }
    for node in net.nodes() {
        if node.kind == NodeKind::InterconnectionWithSink {
            vb.entry(node.id).or_default().push((node.id, None));
        }
    }

    let build = |dotted: bool| -> Vec<LinkElement> {
        let mut elements = Vec::new();
        for (&sink, attachments) in &vb {
            let mut attachments = attachments.clone();
            attachments.sort_by_key(|(j, _)| *j);
            let demand = net.node(sink).and_then(|n| n.demand).unwrap_or(0.0);
            let names = indexed_names("VB", sink, attachments.len(), dotted);
            let single = attachments.len() == 1;
            for ((junction, edges), name) in attachments.into_iter().zip(names) {
                let mut prov: BTreeSet<RawId> = BTreeSet::new();
                match edges {
                    // implicit load of a substation
                    None => {
                        prov.insert(RawId::Node(sink));
                    }
                    Some(edges) => {
                        prov.extend(edges.into_iter().map(RawId::Edge));
                        if single {
                            prov.insert(RawId::Node(sink));
                        }
                    }
                }
                elements.push(LinkElement::vb(name, sink, demand, junction, prov));
            }
        }
        for (&source, attachments) in &vt {
            let mut attachments = attachments.clone();
            attachments.sort_by_key(|(j, _)| *j);
            let capacity = net.node(source).and_then(|n| n.capacity).unwrap_or(0.0);
            let names = indexed_names("VT", source, attachments.len(), dotted);
            let single = attachments.len() == 1;
            for ((junction, edges), name) in attachments.into_iter().zip(names) {
                let mut prov: BTreeSet<RawId> = edges.into_iter().map(RawId::Edge).collect();
                if single {
                    prov.insert(RawId::Node(source));
                }
                elements.push(LinkElement::vt(name, source, capacity, junction, prov));
            }
        }
        let mut hs = h.clone();
        hs.sort_by(|x, y| cmp_edge_ids(&x.0, &y.0));
        for (id, a, b, edges) in hs {
            let prov = edges.into_iter().map(RawId::Edge).collect();
            elements.push(LinkElement::h(format!("H{id}"), a, b, prov));
        }
        elements
    };

    let mut elements = build(false);
    let mut names = HashSet::new();
    if !elements.iter().all(|e| names.insert(e.name.clone())) {
        elements = build(true);
    }
    Ok(LinkNetwork::from_elements(elements))
}

/// Per-junction incidence lists, indexed by element position.
pub fn incidence(net: &LinkNetwork) -> HashMap<JunctionId, Vec<usize>> {
    let mut inc: HashMap<JunctionId, Vec<usize>> = HashMap::new();
    for (i, e) in net.elements().iter().enumerate() {
        for j in e.junctions() {
            inc.entry(j).or_default().push(i);
        }
    }
    inc
}
