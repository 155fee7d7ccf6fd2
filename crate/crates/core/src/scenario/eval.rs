use crate::error::{Error, Result};
use crate::link::{Attach, LinkKind};
use crate::reduction::SubTopology;

use super::Scenario;

#[derive(Debug, Clone, Copy)]
enum Step {
    Span(usize),
    Class(usize),
}

/// A sub-topology compiled for repeated scenario evaluation. Junctions and
/// classes are dense indices so that a search state fits in two words.
#[derive(Debug, Clone)]
pub struct Evaluator {
    vb: usize,
    vb_junction: usize,
    incidence: Vec<Vec<(usize, Step)>>,
    /// Per class, (element, junction) of each VT link.
    class_links: Vec<Vec<(usize, usize)>>,
    transit: bool,
}

impl Evaluator {
    pub fn new(sub: &SubTopology) -> Result<Self> {
        let net = &sub.network;
        if net.len() > 64 {
            return Err(Error::TooLarge { m: net.len(), limit: 64, bytes: 0 });
        }
        if sub.classes.len() > 64 {
            return Err(Error::TooManyClasses(sub.classes.len()));
        }
        let junctions: Vec<u32> = net.junctions().iter().copied().collect();
        if junctions.len() > 64 {
            return Err(Error::TooLarge { m: net.len(), limit: 64, bytes: 0 });
        }
        let dense = |j: u32| junctions.binary_search(&j).expect("junction of this network");
        let mut incidence = vec![Vec::new(); junctions.len()];
        let mut class_links = vec![Vec::new(); sub.classes.len()];
        let mut vb = None;
        for (i, e) in net.elements().iter().enumerate() {
            match (e.kind, e.attach) {
                (LinkKind::VB, Attach::Terminal(j)) => vb = Some((i, dense(j))),
                (LinkKind::VT, Attach::Terminal(j)) => {
                    let class = sub.class_of(i).expect("VT class");
                    incidence[dense(j)].push((i, Step::Class(class)));
                    class_links[class].push((i, dense(j)));
                }
                (LinkKind::H, Attach::Span(a, b)) => {
                    incidence[dense(a)].push((i, Step::Span(dense(b))));
                    incidence[dense(b)].push((i, Step::Span(dense(a))));
                }
                _ => unreachable!("element kinds attach consistently"),
            }
        }
        let (vb, vb_junction) = vb.ok_or_else(|| Error::Format("sub-topology has no VB link".into()))?;
        Ok(Evaluator { vb, vb_junction, incidence, class_links, transit: sub.source_transit })
    }

    /// Bitset of source classes connected to the sink under `s`.
    pub fn connected(&self, s: Scenario) -> u64 {
        if s.is_faulty(self.vb) {
            return 0;
        }
        let mut visited = 1u64 << self.vb_junction;
        let mut stack = [0usize; 64];
        stack[0] = self.vb_junction;
        let mut top = 1;
        let mut classes = 0u64;
        while top > 0 {
            top -= 1;
            let j = stack[top];
            for &(e, step) in &self.incidence[j] {
                if s.is_faulty(e) {
                    continue;
                }
                match step {
                    Step::Span(o) => {
                        if visited >> o & 1 == 0 {
                            visited |= 1 << o;
                            stack[top] = o;
                            top += 1;
                        }
                    }
                    Step::Class(c) => {
                        if classes >> c & 1 == 1 {
                            continue;
                        }
                        classes |= 1 << c;
                        if self.transit {
                            for &(e2, o) in &self.class_links[c] {
                                if !s.is_faulty(e2) && visited >> o & 1 == 0 {
                                    visited |= 1 << o;
                                    stack[top] = o;
                                    top += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
        classes
    }
}

/// Source classes connected to the sink of `sub` under scenario `s`.
pub fn evaluate_scenario(sub: &SubTopology, s: Scenario) -> Result<u64> {
    Ok(Evaluator::new(sub)?.connected(s))
}

/// Sum of class capacities; each source counts once.
pub fn delivered_capacity(sub: &SubTopology, classes: u64) -> f64 {
    sub.class_capacities()
        .iter()
        .enumerate()
        .filter(|(c, _)| classes >> c & 1 == 1)
        .map(|(_, cap)| cap)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fig1;
    use crate::reduction::{extract_sink_subtopology, MapOptions};

    fn classes_to_sources(sub: &SubTopology, bits: u64) -> Vec<u32> {
        let mut v: Vec<u32> = (0..sub.classes.len()).filter(|c| bits >> c & 1 == 1).map(|c| sub.classes[c]).collect();
        v.sort();
        v
    }

    fn mask(sub: &SubTopology, names: &[&str]) -> Scenario {
        Scenario(names.iter().map(|n| 1u64 << sub.network.find(n).unwrap()).sum())
    }

    #[test]
    fn fault_free_vb20_reaches_all() {
        let net = fig1();
        let sub = extract_sink_subtopology(&net, net.find("VB20").unwrap(), MapOptions::default()).unwrap();
        let bits = evaluate_scenario(&sub, Scenario(0)).unwrap();
        assert_eq!(classes_to_sources(&sub, bits), [64, 76, 81]);
        assert_eq!(delivered_capacity(&sub, bits), 350.0);
    }

    #[test]
    fn sink_link_fault_empties() {
        let net = fig1();
        for vb in net.vb_indices() {
            let sub = extract_sink_subtopology(&net, vb, MapOptions::default()).unwrap();
            assert_eq!(evaluate_scenario(&sub, Scenario(1)).unwrap(), 0);
            assert_eq!(delivered_capacity(&sub, 0), 0.0);
        }
    }

    #[test]
    fn vb20_with_76_and_h1_cut_keeps_only_64() {
        let net = fig1();
        let sub = extract_sink_subtopology(&net, net.find("VB20").unwrap(), MapOptions::default()).unwrap();
        let bits = evaluate_scenario(&sub, mask(&sub, &["VT761", "VT762", "H1"])).unwrap();
        assert_eq!(classes_to_sources(&sub, bits), [64]);
        // with H1 intact, 81 comes in through H2
        let bits = evaluate_scenario(&sub, mask(&sub, &["VT761", "VT762", "VT64"])).unwrap();
        assert_eq!(classes_to_sources(&sub, bits), [81]);
    }

    #[test]
    fn shared_source_counts_once() {
        let net = fig1();
        let sub = extract_sink_subtopology(&net, net.find("VB27").unwrap(), MapOptions::default()).unwrap();
        let bits = evaluate_scenario(&sub, mask(&sub, &["VT64", "VT81"])).unwrap();
        assert_eq!(classes_to_sources(&sub, bits), [76]);
        assert_eq!(delivered_capacity(&sub, bits), 150.0);
    }

    #[test]
    fn transit_through_a_shared_source() {
        let net = fig1();
        let opts = MapOptions { source_transit: true, ..MapOptions::default() };
        let sub = extract_sink_subtopology(&net, net.find("VB27").unwrap(), opts).unwrap();
        // H2 cut: 81 is reachable only through generator 76's two links
        let s = mask(&sub, &["H2"]);
        assert_eq!(classes_to_sources(&sub, evaluate_scenario(&sub, s).unwrap()), [64, 76, 81]);
        let plain = extract_sink_subtopology(&net, net.find("VB27").unwrap(), MapOptions::default()).unwrap();
        let s = mask(&plain, &["H2"]);
        assert_eq!(classes_to_sources(&plain, evaluate_scenario(&plain, s).unwrap()), [64, 76]);
    }
}
