use std::collections::{BTreeMap, BTreeSet};

use crate::link::{Attach, JunctionId, LinkElement, LinkKind, LinkNetwork};

/// Elements under reduction, each paired with the set of original element
/// indices it stands for.
#[derive(Debug, Clone)]
pub(crate) struct Tracked {
    pub elements: Vec<LinkElement>,
    pub origin: Vec<BTreeSet<usize>>,
}

impl Tracked {
    pub fn from_network(net: &LinkNetwork) -> Self {
        Tracked {
            elements: net.elements().to_vec(),
            origin: (0..net.len()).map(|i| BTreeSet::from([i])).collect(),
        }
    }

    fn degrees(&self) -> BTreeMap<JunctionId, Vec<usize>> {
        let mut inc: BTreeMap<JunctionId, Vec<usize>> = BTreeMap::new();
        for (i, e) in self.elements.iter().enumerate() {
            for j in e.junctions() {
                inc.entry(j).or_default().push(i);
            }
        }
        inc
    }

    fn remove(&mut self, i: usize) {
        self.elements.remove(i);
        self.origin.remove(i);
    }

    fn drop_loops(&mut self) -> bool {
        let mut changed = false;
        let mut i = 0;
        while i < self.elements.len() {
            if matches!(self.elements[i].attach, Attach::Span(a, b) if a == b) {
                self.remove(i);
                changed = true;
            } else {
                i += 1;
            }
        }
        changed
    }

    /// Junctions of degree two whose pair of elements can be combined.
    pub fn mergeable(&self) -> Vec<(JunctionId, usize, usize)> {
        self.degrees()
            .into_iter()
            .filter_map(|(j, inc)| match inc.as_slice() {
                &[x, y] if x != y && can_merge(&self.elements[x], &self.elements[y]) => Some((j, x, y)),
                _ => None,
            })
            .collect()
    }

    fn merge_at(&mut self, j: JunctionId, x: usize, y: usize) {
        let (keep, gone) = (x.min(y), x.max(y));
        let (a, b) = (&self.elements[keep], &self.elements[gone]);
        let mut provenance = a.provenance.clone();
        provenance.extend(b.provenance.iter().cloned());
        let merged = match (a.kind, b.kind) {
            (LinkKind::H, LinkKind::H) => {
                let far_a = a.attach.other(j).expect("span incident to junction");
                let far_b = b.attach.other(j).expect("span incident to junction");
                LinkElement { attach: Attach::Span(far_a, far_b), provenance, ..a.clone() }
            }
            _ => {
                let (terminal, span) = if a.kind == LinkKind::H { (b, a) } else { (a, b) };
                let far = span.attach.other(j).expect("span incident to junction");
                LinkElement { attach: Attach::Terminal(far), provenance, ..terminal.clone() }
            }
        };
        let origin: BTreeSet<usize> = self.origin[keep].union(&self.origin[gone]).copied().collect();
        self.elements[keep] = merged;
        self.origin[keep] = origin;
        self.remove(gone);
    }

    /// Runs eliminations to a fixed point; `pick` chooses which of the
    /// currently mergeable junctions goes next.
    pub fn reduce_by(&mut self, mut pick: impl FnMut(&[(JunctionId, usize, usize)]) -> usize) {
        self.drop_loops();
        loop {
            let candidates = self.mergeable();
            if candidates.is_empty() {
                break;
            }
            let (j, x, y) = candidates[pick(&candidates)];
            self.merge_at(j, x, y);
            self.drop_loops();
        }
    }

    /// Removes H links hanging off junctions that hold nothing else.
    pub fn prune_dead_ends(&mut self, keep: JunctionId) -> bool {
        let mut changed = false;
        loop {
            let leaf = self.degrees().into_iter().find_map(|(j, inc)| match inc.as_slice() {
                &[x] if j != keep && self.elements[x].kind == LinkKind::H => Some(x),
                _ => None,
            });
            match leaf {
                Some(x) => {
                    self.remove(x);
                    changed = true;
                }
                None => return changed,
            }
        }
    }
}

fn can_merge(a: &LinkElement, b: &LinkElement) -> bool {
    matches!(
        (a.kind, b.kind),
        (LinkKind::H, LinkKind::H)
            | (LinkKind::H, LinkKind::VT)
            | (LinkKind::VT, LinkKind::H)
            | (LinkKind::H, LinkKind::VB)
            | (LinkKind::VB, LinkKind::H)
    )
}

/// Combines links in series until no degree-two junction can be eliminated.
///
/// H+H becomes H, VT+H becomes VT and VB+H becomes VB, with the union of
/// provenance. Pairs of vertical links are left alone. Junctions are taken in
/// ascending id order.
pub fn series_reduce(net: &LinkNetwork) -> LinkNetwork {
    let mut t = Tracked::from_network(net);
    t.reduce_by(|_| 0);
    LinkNetwork::from_elements(t.elements)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raw::RawId;

    fn prov(ids: &[&str]) -> BTreeSet<RawId> {
        ids.iter().map(|s| RawId::Edge(s.to_string())).collect()
    }

    #[test]
    fn h_chain_between_hubs_collapses() {
        // hubs 1 and 9 each carry a VB/VT pair; 1 - 2 - 3 - 4 - 9 is a chain
        let mut elements = vec![
            LinkElement::vb("VB1".into(), 100, 1.0, 1, prov(&["b"])),
            LinkElement::vt("VT1".into(), 200, 1.0, 1, prov(&["t1"])),
            LinkElement::vt("VT9".into(), 201, 1.0, 9, prov(&["t9"])),
            LinkElement::vt("VT9b".into(), 202, 1.0, 9, prov(&["t9b"])),
        ];
        for (k, (a, b)) in [(1, 2), (2, 3), (3, 4), (4, 9)].into_iter().enumerate() {
            elements.push(LinkElement::h(format!("H{k}"), a, b, prov(&[&format!("h{k}")])));
        }
        let reduced = series_reduce(&LinkNetwork::from_elements(elements));
        assert_eq!(reduced.len(), 5);
        let h: Vec<_> = reduced.elements().iter().filter(|e| e.kind == LinkKind::H).collect();
        assert_eq!(h.len(), 1);
        assert_eq!(h[0].provenance, prov(&["h0", "h1", "h2", "h3"]));
        assert_eq!(h[0].attach.junctions().collect::<BTreeSet<_>>(), BTreeSet::from([1, 9]));
    }

    #[test]
    fn vertical_pairs_do_not_merge() {
        let net = LinkNetwork::from_elements(vec![
            LinkElement::vb("VB".into(), 1, 1.0, 5, prov(&["b"])),
            LinkElement::vt("VT".into(), 2, 1.0, 5, prov(&["t"])),
        ]);
        assert_eq!(series_reduce(&net), net);
    }

    #[test]
    fn parallel_pair_becomes_loop_and_vanishes() {
        // 1 = hub, 2 reached by two H links only
        let net = LinkNetwork::from_elements(vec![
            LinkElement::vb("VB".into(), 1, 1.0, 1, prov(&["b"])),
            LinkElement::vt("VT".into(), 2, 1.0, 1, prov(&["t"])),
            LinkElement::h("Ha".into(), 1, 2, prov(&["a"])),
            LinkElement::h("Hb".into(), 2, 1, prov(&["b2"])),
        ]);
        let reduced = series_reduce(&net);
        assert_eq!(reduced.len(), 2);
    }
}
