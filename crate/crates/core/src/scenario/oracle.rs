//! Direct connectivity check on the full network, used to cross-check the
//! database route. It shares no code with extraction, reduction or lookup.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::link::{LinkKind, LinkNetwork};

use super::FaultSet;

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Sources connected to VB link `vb` when the faulty elements are removed.
pub fn brute_force_oracle(net: &LinkNetwork, faults: &FaultSet, vb: usize, source_transit: bool) -> Result<BTreeSet<u32>> {
    faults.check_width(net)?;
    let sink_link = net.elements().get(vb).ok_or_else(|| Error::UnknownElement(format!("#{vb}")))?;
    if sink_link.kind != LinkKind::VB {
        return Err(Error::NotVb(sink_link.name.clone()));
    }
    if faults.is_faulty(vb) {
        return Ok(BTreeSet::new());
    }
    let mut ids: HashMap<(u8, u32), usize> = HashMap::new();
    let mut node = |tag: u8, id: u32| {
        let n = ids.len();
        *ids.entry((tag, id)).or_insert(n)
    };
    let mut pairs = Vec::new();
    for (i, e) in net.elements().iter().enumerate() {
        if faults.is_faulty(i) {
            continue;
        }
        let ends: Vec<u32> = e.junctions().collect();
        match e.kind {
            LinkKind::H => pairs.push((node(0, ends[0]), node(0, ends[1]))),
            LinkKind::VT if source_transit => {
                pairs.push((node(0, ends[0]), node(1, e.source_id.expect("VT source"))))
            }
            _ => {}
        }
    }
    let start = node(0, sink_link.junctions().next().expect("VB junction"));
    let endpoints: Vec<(u32, usize)> = net
        .elements()
        .iter()
        .enumerate()
        .filter(|(i, e)| e.kind == LinkKind::VT && !faults.is_faulty(*i))
        .map(|(_, e)| (e.source_id.expect("VT source"), node(0, e.junctions().next().expect("VT junction"))))
        .collect();
    let mut uf = UnionFind::new(ids.len());
    for (a, b) in pairs {
        uf.union(a, b);
    }
    let root = uf.find(start);
    Ok(endpoints.into_iter().filter(|&(_, j)| uf.find(j) == root).map(|(s, _)| s).collect())
}

/// Union of [`brute_force_oracle`] over all VB links of a sink.
pub fn oracle_sink(net: &LinkNetwork, faults: &FaultSet, sink: u32, source_transit: bool) -> Result<BTreeSet<u32>> {
    let mut out = BTreeSet::new();
    let mut any = false;
    for vb in net.vb_indices().filter(|&i| net.element(i).sink_id == Some(sink)) {
        any = true;
        out.extend(brute_force_oracle(net, faults, vb, source_transit)?);
    }
    if !any {
        return Err(Error::NoVb(sink));
    }
    Ok(out)
}
