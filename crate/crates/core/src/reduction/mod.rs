//! Mapping of a multi-source, multi-sink link network onto single-VB
//! sub-topologies.
//!
//! For each VB link: drop every other VB link, keep what is still connected
//! to its junction, combine series links, then canonicalize so that sinks
//! which see the network alike share one sub-topology (and one scenario
//! database).

mod canon;
mod series;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use log::warn;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::link::{Attach, JunctionId, LinkElement, LinkKind, LinkNetwork};

pub use canon::{canonical_form, CanonicalForm, DedupMode};
pub use series::series_reduce;
pub(crate) use series::Tracked;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MapOptions {
    pub mode: DedupMode,
    /// Let connectivity pass through a source that has several VT links.
    pub source_transit: bool,
}

/// A network served by exactly one VB link, in canonical element order:
/// the VB link is element 0, then VT links, then H links. Junctions are
/// numbered 0.. in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct SubTopology {
    /// Index of the VB element in the original network.
    pub sink_vb: usize,
    pub network: LinkNetwork,
    /// Per element, the original element indices it represents.
    pub provenance_map: Vec<BTreeSet<usize>>,
    /// Source id of each source class, by class index.
    pub classes: Vec<u32>,
    pub canonical_key: Vec<u8>,
    /// No source is reachable; the sink never survives.
    pub dead: bool,
    pub source_transit: bool,
}

impl SubTopology {
    pub fn len(&self) -> usize {
        self.network.len()
    }

    pub fn is_empty(&self) -> bool {
        self.network.is_empty()
    }

    pub fn vb_element(&self) -> usize {
        0
    }

    /// Class index of a VT element.
    pub fn class_of(&self, element: usize) -> Option<usize> {
        let source = self.network.element(element).source_id?;
        self.classes.iter().position(|&s| s == source)
    }

    /// Capacity of each class.
    pub fn class_capacities(&self) -> Vec<f64> {
        self.classes
            .iter()
            .map(|&s| {
                self.network
                    .elements()
                    .iter()
                    .find(|e| e.source_id == Some(s))
                    .map(|e| e.magnitude())
                    .unwrap_or(0.0)
            })
            .collect()
    }
}

/// Reachable part of `net` as seen from junction `start`, ignoring VB
/// links other than `keep`.
fn reachable_elements(net: &LinkNetwork, keep: usize, start: JunctionId, transit: bool) -> Vec<usize> {
    let live = |i: usize| net.element(i).kind != LinkKind::VB || i == keep;
    let mut by_junction: BTreeMap<JunctionId, Vec<usize>> = BTreeMap::new();
    let mut by_source: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, e) in net.elements().iter().enumerate() {
        if !live(i) {
            continue;
        }
        for j in e.junctions() {
            by_junction.entry(j).or_default().push(i);
        }
        if let Some(s) = e.source_id {
            by_source.entry(s).or_default().push(i);
        }
    }
    let mut seen = BTreeSet::from([start]);
    let mut expanded = BTreeSet::new();
    let mut queue = VecDeque::from([start]);
    while let Some(j) = queue.pop_front() {
        for &i in by_junction.get(&j).into_iter().flatten() {
            let e = net.element(i);
            let mut next: Vec<JunctionId> = e.attach.other(j).into_iter().collect();
            if let (true, Some(s)) = (transit, e.source_id) {
                if expanded.insert(s) {
                    next.extend(by_source[&s].iter().flat_map(|&k| net.element(k).junctions()));
                }
            }
            for n in next {
                if seen.insert(n) {
                    queue.push_back(n);
                }
            }
        }
    }
    (0..net.len())
        .filter(|&i| live(i) && net.element(i).junctions().all(|j| seen.contains(&j)))
        .collect()
}

/// Extraction before canonical ordering.
pub(crate) fn extract_tracked(net: &LinkNetwork, vb: usize, transit: bool) -> Result<(Tracked, bool)> {
    if vb >= net.len() {
        return Err(Error::UnknownElement(format!("#{vb}")));
    }
    let vb_elem = net.element(vb);
    if vb_elem.kind != LinkKind::VB {
        return Err(Error::NotVb(vb_elem.name.clone()));
    }
    let Attach::Terminal(start) = vb_elem.attach else { unreachable!("VB is terminal") };
    let kept = reachable_elements(net, vb, start, transit);
    let mut tracked = Tracked {
        elements: kept.iter().map(|&i| net.element(i).clone()).collect(),
        origin: kept.iter().map(|&i| BTreeSet::from([i])).collect(),
    };
    let dead = !tracked.elements.iter().any(|e| e.kind == LinkKind::VT);
    if dead {
        let pos = kept.iter().position(|&i| i == vb).expect("VB kept");
        tracked = Tracked {
            elements: vec![tracked.elements[pos].clone()],
            origin: vec![tracked.origin[pos].clone()],
        };
        return Ok((tracked, true));
    }
    loop {
        tracked.reduce_by(|_| 0);
        let vb_junction = tracked
            .elements
            .iter()
            .find(|e| e.kind == LinkKind::VB)
            .and_then(|e| e.junctions().next())
            .expect("VB survives reduction");
        if !tracked.prune_dead_ends(vb_junction) {
            break;
        }
    }
    Ok((tracked, false))
}

fn finish(vb: usize, tracked: Tracked, dead: bool, opts: MapOptions) -> SubTopology {
    let form = canonical_form(&tracked.elements, opts.mode);
    let mut elements = Vec::with_capacity(form.order.len());
    let mut provenance_map = Vec::with_capacity(form.order.len());
    for &i in &form.order {
        let e = &tracked.elements[i];
        let attach = match e.attach {
            Attach::Terminal(j) => Attach::Terminal(form.junctions[&j]),
            Attach::Span(a, b) => {
                let (x, y) = (form.junctions[&a], form.junctions[&b]);
                Attach::Span(x.min(y), x.max(y))
            }
        };
        elements.push(LinkElement { attach, ..e.clone() });
        provenance_map.push(tracked.origin[i].clone());
    }
    debug_assert!(provenance_map[0].contains(&vb));
    SubTopology {
        sink_vb: vb,
        network: LinkNetwork::from_elements(elements),
        provenance_map,
        classes: form.classes,
        canonical_key: form.key,
        dead,
        source_transit: opts.source_transit,
    }
}

/// Sub-topology for one VB link: other VB links removed, unreachable parts
/// dropped, series links combined.
pub fn extract_sink_subtopology(net: &LinkNetwork, vb: usize, opts: MapOptions) -> Result<SubTopology> {
    let (tracked, dead) = extract_tracked(net, vb, opts.source_transit)?;
    if dead {
        warn!("{}: no source reachable, sink never survives", net.element(vb).name);
    }
    Ok(finish(vb, tracked, dead, opts))
}

/// VB elements of a sink, each to be extracted on its own.
pub fn split_multi_vb(net: &LinkNetwork, sink: u32) -> Result<Vec<usize>> {
    let vbs: Vec<usize> = net.vb_indices().filter(|&i| net.element(i).sink_id == Some(sink)).collect();
    if vbs.is_empty() {
        return Err(Error::NoVb(sink));
    }
    Ok(vbs)
}

pub fn canonical_key(sub: &SubTopology, mode: DedupMode) -> Vec<u8> {
    canonical_form(sub.network.elements(), mode).key
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub vb: usize,
    /// Index into [`MappingResult::subs`].
    pub sub: usize,
    /// This VB's own extraction. Element k and class k line up with element
    /// k and class k of the representative.
    pub extraction: SubTopology,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MappingResult {
    pub subs: Vec<SubTopology>,
    /// One entry per VB element, ascending by VB index.
    pub assignment: Vec<Assignment>,
    pub vb_count: usize,
    pub options: MapOptions,
}

impl MappingResult {
    pub fn assignment_for(&self, vb: usize) -> Option<&Assignment> {
        self.assignment.iter().find(|a| a.vb == vb)
    }

    /// Σ 2^m over the distinct sub-topologies.
    pub fn scenario_total(&self) -> u128 {
        self.subs.iter().map(|s| 1u128 << s.len()).sum()
    }

    /// Element names of a VB's extraction paired with the representative's.
    pub fn bijection(&self, a: &Assignment) -> Vec<(String, String)> {
        let rep = &self.subs[a.sub];
        a.extraction
            .network
            .elements()
            .iter()
            .zip(rep.network.elements())
            .map(|(x, y)| (x.name.clone(), y.name.clone()))
            .collect()
    }
}

/// Runs the whole mapping: extract every VB, group by canonical key, keep one
/// representative per key.
pub fn map_network(net: &LinkNetwork, opts: MapOptions) -> Result<MappingResult> {
    let vbs: Vec<usize> = net.vb_indices().collect();
    let extractions: Vec<SubTopology> = vbs
        .par_iter()
        .map(|&vb| extract_sink_subtopology(net, vb, opts))
        .collect::<Result<_>>()?;
    let mut subs: Vec<SubTopology> = Vec::new();
    let mut by_key: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
    let mut assignment = Vec::with_capacity(vbs.len());
    for (vb, extraction) in vbs.iter().copied().zip(extractions) {
        let sub = *by_key.entry(extraction.canonical_key.clone()).or_insert_with(|| {
            subs.push(extraction.clone());
            subs.len() - 1
        });
        assignment.push(Assignment { vb, sub, extraction });
    }
    Ok(MappingResult { subs, assignment, vb_count: vbs.len(), options: opts })
}
