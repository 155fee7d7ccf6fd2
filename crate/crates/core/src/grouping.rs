//! Groups of sinks that reach each other without passing through a
//! generator, and the generators each group sees.
//!
//! Generators never transit power between groups, so components are taken
//! over the non-source nodes only.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::link::to_link_network;
use crate::raw::{NodeKind, ValidatedRawNetwork};
use crate::reduction::{extract_sink_subtopology, split_multi_vb, MapOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    /// Every non-source node of the component.
    pub members: BTreeSet<u32>,
    pub sinks: BTreeSet<u32>,
    pub generators: BTreeSet<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupDecomposition {
    pub groups: Vec<Group>,
    /// Generator id -> indices of the groups it touches.
    pub shared_generators: BTreeMap<u32, BTreeSet<usize>>,
    /// Generators adjacent to no sink-bearing component.
    pub orphans: BTreeSet<u32>,
}

impl GroupDecomposition {
    pub fn group_of(&self, sink: u32) -> Option<usize> {
        self.groups.iter().position(|g| g.sinks.contains(&sink))
    }
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    fn get(&mut self, v: usize) -> usize {
        if self.parent[v] != v {
            self.parent[v] = self.get(self.parent[v]);
        }
        self.parent[v]
    }

    fn unite(&mut self, a: usize, b: usize) {
        let (a, b) = (self.get(a), self.get(b));
        if a != b {
            self.parent[a] = b;
        }
    }
}

pub fn decompose_groups(net: &ValidatedRawNetwork) -> GroupDecomposition {
    let nodes = net.nodes();
    let is_source = |id: u32| net.node(id).map(|n| n.kind == NodeKind::Source).unwrap_or(false);
    let mut dsu = Dsu::new(nodes.len());
    for e in net.edges() {
        if !is_source(e.a) && !is_source(e.b) {
            let (a, b) = (net.node_index(e.a).expect("validated"), net.node_index(e.b).expect("validated"));
            dsu.unite(a, b);
        }
    }
    let mut components: BTreeMap<usize, BTreeSet<u32>> = BTreeMap::new();
    for (i, n) in nodes.iter().enumerate() {
        if n.kind != NodeKind::Source {
            components.entry(dsu.get(i)).or_default().insert(n.id);
        }
    }
    let mut groups: Vec<Group> = components
        .into_values()
        .filter_map(|members| {
            let sinks: BTreeSet<u32> =
                members.iter().copied().filter(|&id| net.node(id).is_some_and(|n| n.kind.is_sink_bearing())).collect();
            if sinks.is_empty() {
                return None;
            }
            let generators = net
                .edges()
                .iter()
                .filter_map(|e| match (members.contains(&e.a), members.contains(&e.b)) {
                    (true, false) if is_source(e.b) => Some(e.b),
                    (false, true) if is_source(e.a) => Some(e.a),
                    _ => None,
                })
                .collect();
            Some(Group { members, sinks, generators })
        })
        .collect();
    groups.sort_by_key(|g| g.members.iter().next().copied());

    let mut shared_generators: BTreeMap<u32, BTreeSet<usize>> = BTreeMap::new();
    for (k, g) in groups.iter().enumerate() {
        for &gen in &g.generators {
            shared_generators.entry(gen).or_default().insert(k);
        }
    }
    let orphans = net.source_ids().filter(|s| !shared_generators.contains_key(s)).collect();
    GroupDecomposition { groups, shared_generators, orphans }
}

/// Generators a sink sees: the sources of every VT link left in its
/// sub-topologies, built on its group's sub-grid.
pub fn reachable_sources(net: &ValidatedRawNetwork, sink: u32, source_transit: bool) -> Result<BTreeSet<u32>> {
    let node = net.node(sink).ok_or(Error::UnknownNode(sink))?;
    if !node.kind.is_sink_bearing() {
        return Err(Error::NotASink(sink));
    }
    let groups = decompose_groups(net);
    let group = &groups.groups[groups.group_of(sink).expect("every sink is in a group")];
    let keep: HashSet<u32> = group.members.iter().chain(&group.generators).copied().collect();
    let links = to_link_network(&net.induced(&keep))?;
    let opts = MapOptions { source_transit, ..MapOptions::default() };
    let mut out = BTreeSet::new();
    for vb in split_multi_vb(&links, sink)? {
        let sub = extract_sink_subtopology(&links, vb, opts)?;
        out.extend(sub.network.elements().iter().filter_map(|e| e.source_id));
    }
    Ok(out)
}

fn braces(ids: &BTreeSet<u32>) -> String {
    let inner: Vec<String> = ids.iter().map(u32::to_string).collect();
    format!("{{{}}}", inner.join(","))
}

/// Per-sink generator sets for one group.
pub fn group_sink_sets(net: &ValidatedRawNetwork, group: &Group, source_transit: bool) -> Result<BTreeMap<u32, BTreeSet<u32>>> {
    group.sinks.iter().map(|&s| Ok((s, reachable_sources(net, s, source_transit)?))).collect()
}

/// Adjacency-list style table: a `Group k` heading, then one
/// `<sink>: {<gen>,...}` line per sink.
pub fn render_table(net: &ValidatedRawNetwork, groups: &GroupDecomposition, source_transit: bool) -> Result<String> {
    let mut out = String::new();
    for (k, g) in groups.groups.iter().enumerate() {
        let sets = group_sink_sets(net, g, source_transit)?;
        let _ = writeln!(out, "Group {}", k + 1);
        for (sink, gens) in &sets {
            let _ = writeln!(out, "{sink}: {}", braces(gens));
        }
        if sets.values().collect::<BTreeSet<_>>().len() > 1 {
            let _ = writeln!(out, "# sinks in group {} see different generator sets", k + 1);
        }
        out.push('\n');
    }
    if !groups.orphans.is_empty() {
        let _ = writeln!(out, "# orphan generators: {}", braces(&groups.orphans));
    }
    Ok(out)
}

/// `group <k>: sinks={..} gens={..}` followed by `sink <id>: {..}` lines.
pub fn render_machine(net: &ValidatedRawNetwork, groups: &GroupDecomposition, source_transit: bool) -> Result<String> {
    let mut out = String::new();
    for (k, g) in groups.groups.iter().enumerate() {
        let _ = writeln!(out, "group {}: sinks={} gens={}", k + 1, braces(&g.sinks), braces(&g.generators));
        for (sink, gens) in group_sink_sets(net, g, source_transit)? {
            let _ = writeln!(out, "sink {sink}: {}", braces(&gens));
        }
    }
    for o in &groups.orphans {
        let _ = writeln!(out, "orphan {o}");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fig1_validated;
    use crate::raw::{RawEdge, RawNetwork, RawNode};

    #[test]
    fn micro_grid_is_one_group() {
        let net = fig1_validated();
        let groups = decompose_groups(&net);
        assert_eq!(groups.groups.len(), 1);
        assert_eq!(groups.groups[0].sinks, BTreeSet::from([20, 27, 28, 30]));
        assert_eq!(groups.groups[0].generators, BTreeSet::from([64, 76, 81]));
        for sink in [20, 27, 28, 30] {
            assert_eq!(reachable_sources(&net, sink, false).unwrap(), BTreeSet::from([64, 76, 81]));
        }
        let table = render_table(&net, &groups, false).unwrap();
        assert!(table.contains("Group 1\n20: {64,76,81}\n27: {64,76,81}\n28: {64,76,81}\n30: {64,76,81}\n"));
    }

    #[test]
    fn clusters_joined_by_a_generator_stay_apart() {
        let raw = RawNetwork {
            name: "two".into(),
            nodes: vec![
                RawNode::interconnection_with_sink(1, 1.0),
                RawNode::interconnection_with_sink(2, 1.0),
                RawNode::interconnection_with_sink(3, 1.0),
                RawNode::source(68, 10.0),
                RawNode::source(69, 10.0),
                RawNode::source(70, 10.0),
            ],
            edges: vec![
                RawEdge::new("1", 1, 68),
                RawEdge::new("2", 2, 68),
                RawEdge::new("3", 2, 69),
                RawEdge::new("4", 3, 69),
                RawEdge::new("5", 2, 3),
            ],
        };
        let net = ValidatedRawNetwork::validate(raw).unwrap().merge_parallel();
        let groups = decompose_groups(&net);
        assert_eq!(groups.groups.len(), 2);
        assert_eq!(groups.groups[0].sinks, BTreeSet::from([1]));
        assert_eq!(groups.groups[1].sinks, BTreeSet::from([2, 3]));
        assert_eq!(groups.shared_generators[&68], BTreeSet::from([0, 1]));
        assert_eq!(groups.orphans, BTreeSet::from([70]));
        // sink 1 sees 68 only; power from 69 cannot pass through 68
        assert_eq!(reachable_sources(&net, 1, false).unwrap(), BTreeSet::from([68]));
        assert_eq!(reachable_sources(&net, 1, true).unwrap(), BTreeSet::from([68]));
        assert_eq!(reachable_sources(&net, 3, false).unwrap(), BTreeSet::from([68, 69]));
        assert_eq!(reachable_sources(&net, 68, false), Err(Error::NotASink(68)));
        assert_eq!(reachable_sources(&net, 99, false), Err(Error::UnknownNode(99)));
    }

    #[test]
    fn fully_connected_substations_form_one_group() {
        let mut nodes: Vec<RawNode> = (1..=4).map(|i| RawNode::interconnection_with_sink(i, 1.0)).collect();
        nodes.push(RawNode::source(9, 5.0));
        let mut edges = Vec::new();
        for a in 1..=4u32 {
            for b in a + 1..=4 {
                edges.push(RawEdge::new(format!("{a}{b}"), a, b));
            }
        }
        edges.push(RawEdge::new("g", 9, 1));
        let net = ValidatedRawNetwork::validate(RawNetwork { name: "k4".into(), nodes, edges }).unwrap();
        let groups = decompose_groups(&net);
        assert_eq!(groups.groups.len(), 1);
        assert_eq!(groups.groups[0].sinks.len(), 4);
    }
}
