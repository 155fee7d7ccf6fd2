//! Canonical labeling of small sub-topologies.
//!
//! A sub-topology is viewed as a vertex-colored multigraph: junctions
//! (colored by whether the VB link hangs there), one vertex per source class,
//! H links between junctions and VT links between a junction and its class
//! vertex. The canonical form is the lexicographically smallest
//! serialization over all leaves of an individualization-refinement search
//! tree, with interchangeable twin vertices branched on only once.

use std::collections::{BTreeMap, BTreeSet};

use crate::link::{Attach, JunctionId, LinkElement, LinkKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum DedupMode {
    /// Source identities and weights are part of the key.
    Labeled,
    /// Source identities erased; link kinds, weights and which VT links
    /// share a source are kept.
    #[default]
    Structural,
}

impl DedupMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DedupMode::Labeled => "labeled",
            DedupMode::Structural => "structural",
        }
    }
}

impl std::str::FromStr for DedupMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "labeled" => Ok(DedupMode::Labeled),
            "structural" => Ok(DedupMode::Structural),
            other => Err(format!("unknown dedup mode '{other}'")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CanonicalForm {
    pub key: Vec<u8>,
    /// `order[k]` is the index of the element placed at canonical position k.
    pub order: Vec<usize>,
    /// Junction id -> canonical junction number.
    pub junctions: BTreeMap<JunctionId, u32>,
    /// Source id of each canonical class, in class order.
    pub classes: Vec<u32>,
}

struct Graph {
    labels: Vec<Vec<u8>>,
    adj: Vec<Vec<(usize, usize)>>,
    edge_labels: Vec<Vec<u8>>,
    twins: Vec<Vec<bool>>,
}

fn weight_bytes(w: Option<f64>) -> [u8; 8] {
    let w = w.unwrap_or(0.0);
    let w = if w == 0.0 { 0.0 } else { w };
    w.to_bits().to_be_bytes()
}

pub fn canonical_form(elements: &[LinkElement], mode: DedupMode) -> CanonicalForm {
    let junction_ids: BTreeSet<JunctionId> = elements.iter().flat_map(|e| e.junctions()).collect();
    let class_ids: BTreeSet<u32> = elements.iter().filter_map(|e| e.source_id).collect();
    let junction_ids: Vec<JunctionId> = junction_ids.into_iter().collect();
    let class_ids: Vec<u32> = class_ids.into_iter().collect();
    let jv = |j: JunctionId| junction_ids.binary_search(&j).expect("known junction");
    let cv = |s: u32| junction_ids.len() + class_ids.binary_search(&s).expect("known class");
    let n = junction_ids.len() + class_ids.len();

    let mut labels = vec![Vec::new(); n];
    for (i, label) in labels.iter_mut().enumerate().take(junction_ids.len()) {
        let vbs = elements
            .iter()
            .filter(|e| e.kind == LinkKind::VB && e.attach == Attach::Terminal(junction_ids[i]))
            .count();
        label.extend([0u8, vbs as u8]);
    }
    for (k, &s) in class_ids.iter().enumerate() {
        let label = &mut labels[junction_ids.len() + k];
        label.push(1);
        if mode == DedupMode::Labeled {
            label.extend(s.to_be_bytes());
        }
    }

    // (u, v, label) per H / VT element
    let mut raw_edges: Vec<(usize, usize, Vec<u8>)> = Vec::new();
    for e in elements {
        match (e.kind, e.attach) {
            (LinkKind::H, Attach::Span(a, b)) => raw_edges.push((jv(a), jv(b), vec![2])),
            (LinkKind::VT, Attach::Terminal(j)) => {
                let mut l = vec![1];
                l.extend(weight_bytes(e.weight));
                raw_edges.push((jv(j), cv(e.source_id.expect("VT has a source")), l));
            }
            _ => {}
        }
    }
    let mut edge_labels: Vec<Vec<u8>> = raw_edges.iter().map(|(_, _, l)| l.clone()).collect();
    edge_labels.sort();
    edge_labels.dedup();
    let mut adj = vec![Vec::new(); n];
    for (u, v, l) in &raw_edges {
        let code = edge_labels.binary_search(l).expect("label present");
        adj[*u].push((*v, code));
        adj[*v].push((*u, code));
    }
    for a in &mut adj {
        a.sort();
    }
    let twins = (0..n)
        .map(|u| (0..n).map(|v| u != v && labels[u] == labels[v] && are_twins(&adj, u, v)).collect())
        .collect();
    let graph = Graph { labels, adj, edge_labels, twins };

    let mut distinct: Vec<&Vec<u8>> = graph.labels.iter().collect();
    distinct.sort();
    distinct.dedup();
    let colors: Vec<usize> = graph.labels.iter().map(|l| distinct.binary_search(&l).expect("label")).collect();

    let mut best: Option<(Vec<u8>, Vec<usize>)> = None;
    search(&graph, colors, &mut best);
    let (cert, position) = best.unwrap_or_default();

    let mut key = vec![match mode {
        DedupMode::Labeled => b'L',
        DedupMode::Structural => b'S',
    }];
    key.extend(cert);

    let mut junction_order: Vec<usize> = (0..junction_ids.len()).collect();
    junction_order.sort_by_key(|&v| position[v]);
    let junctions: BTreeMap<JunctionId, u32> =
        junction_order.iter().enumerate().map(|(k, &v)| (junction_ids[v], k as u32)).collect();
    let mut class_order: Vec<usize> = (junction_ids.len()..n).collect();
    class_order.sort_by_key(|&v| position[v]);
    let class_rank: BTreeMap<u32, u32> = class_order
        .iter()
        .enumerate()
        .map(|(k, &v)| (class_ids[v - junction_ids.len()], k as u32))
        .collect();
    let classes = class_order.iter().map(|&v| class_ids[v - junction_ids.len()]).collect();

    let sort_key = |e: &LinkElement| -> (u8, u32, u32, [u8; 8]) {
        match e.attach {
            Attach::Terminal(j) => {
                let class = e.source_id.map(|s| class_rank[&s]).unwrap_or(0);
                (e.kind.code(), junctions[&j], class, weight_bytes(e.weight))
            }
            Attach::Span(a, b) => {
                let (x, y) = (junctions[&a], junctions[&b]);
                (e.kind.code(), x.min(y), x.max(y), [0; 8])
            }
        }
    };
    let mut order: Vec<usize> = (0..elements.len()).collect();
    order.sort_by_key(|&i| sort_key(&elements[i]));

    CanonicalForm { key, order, junctions, classes }
}

fn are_twins(adj: &[Vec<(usize, usize)>], u: usize, v: usize) -> bool {
    let strip = |list: &[(usize, usize)], other: usize| -> Vec<(usize, usize)> {
        list.iter().filter(|(w, _)| *w != other).copied().collect()
    };
    let nu = strip(&adj[u], v);
    let nv = strip(&adj[v], u);
    let between_u: Vec<usize> = adj[u].iter().filter(|(w, _)| *w == v).map(|(_, l)| *l).collect();
    let between_v: Vec<usize> = adj[v].iter().filter(|(w, _)| *w == u).map(|(_, l)| *l).collect();
    nu == nv && between_u == between_v
}

fn refine(graph: &Graph, colors: &mut [usize]) {
    let mut classes = count_classes(colors);
    loop {
        let sigs: Vec<(usize, Vec<(usize, usize)>)> = (0..colors.len())
            .map(|v| {
                let mut nb: Vec<(usize, usize)> = graph.adj[v].iter().map(|&(w, l)| (l, colors[w])).collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let mut distinct: Vec<&(usize, Vec<(usize, usize)>)> = sigs.iter().collect();
        distinct.sort();
        distinct.dedup();
        for (v, sig) in sigs.iter().enumerate() {
            colors[v] = distinct.binary_search(&sig).expect("signature");
        }
        if distinct.len() == classes {
            return;
        }
        classes = distinct.len();
    }
}

fn count_classes(colors: &[usize]) -> usize {
    colors.iter().collect::<BTreeSet<_>>().len()
}

fn certificate(graph: &Graph, colors: &[usize]) -> Vec<u8> {
    let n = colors.len();
    let mut by_pos = vec![0; n];
    for (v, &c) in colors.iter().enumerate() {
        by_pos[c] = v;
    }
    let mut out = Vec::new();
    out.extend((n as u32).to_be_bytes());
    for &v in &by_pos {
        out.push(graph.labels[v].len() as u8);
        out.extend(&graph.labels[v]);
    }
    let mut edges: Vec<(usize, usize, &[u8])> = Vec::new();
    for (u, list) in graph.adj.iter().enumerate() {
        for &(w, l) in list {
            let (a, b) = (colors[u], colors[w]);
            if a < b {
                edges.push((a, b, &graph.edge_labels[l]));
            }
        }
    }
    edges.sort();
    out.extend((edges.len() as u32).to_be_bytes());
    for (a, b, l) in edges {
        out.extend((a as u32).to_be_bytes());
        out.extend((b as u32).to_be_bytes());
        out.push(l.len() as u8);
        out.extend(l);
    }
    out
}

fn search(graph: &Graph, mut colors: Vec<usize>, best: &mut Option<(Vec<u8>, Vec<usize>)>) {
    refine(graph, &mut colors);
    let n = colors.len();
    let mut sizes = vec![0usize; n];
    for &c in &colors {
        sizes[c] += 1;
    }
    let Some(target) = (0..n).find(|&c| sizes[c] > 1) else {
        let cert = certificate(graph, &colors);
        if best.as_ref().is_none_or(|(b, _)| cert < *b) {
            *best = Some((cert, colors));
        }
        return;
    };
    let cell: Vec<usize> = (0..n).filter(|&v| colors[v] == target).collect();
    let mut tried: Vec<usize> = Vec::new();
    for &v in &cell {
        if tried.iter().any(|&w| graph.twins[w][v]) {
            continue;
        }
        tried.push(v);
        let next: Vec<usize> = colors
            .iter()
            .enumerate()
            .map(|(u, &c)| if c > target || (c == target && u != v) { c + 1 } else { c })
            .collect();
        search(graph, next, best);
    }
}
