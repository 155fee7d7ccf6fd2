//! Graphviz export. Junctions are points; every VT link ends at a box for
//! its source and every VB link at a circle for its sink.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::link::{Attach, LinkKind, LinkNetwork};

pub fn link_network_dot(net: &LinkNetwork, title: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph \"{}\" {{", title.replace('"', "'"));
    let _ = writeln!(out, "  node [fontsize=10];");
    for j in net.junctions() {
        let _ = writeln!(out, "  J{j} [shape=point, xlabel=\"J{j}\"];");
    }
    let sources: BTreeSet<u32> = net.elements().iter().filter_map(|e| e.source_id).collect();
    for s in &sources {
        let _ = writeln!(out, "  G{s} [shape=box, label=\"+{s}\"];");
    }
    for (i, e) in net.elements().iter().enumerate() {
        match (e.kind, e.attach) {
            (LinkKind::VT, Attach::Terminal(j)) => {
                let _ = writeln!(out, "  G{} -- J{j} [label=\"{}\", dir=forward];", e.source_id.unwrap_or(0), e.name);
            }
            (LinkKind::VB, Attach::Terminal(j)) => {
                let _ = writeln!(out, "  L{i} [shape=circle, label=\"-\"];");
                let _ = writeln!(out, "  J{j} -- L{i} [label=\"{}\", dir=forward];", e.name);
            }
            (_, Attach::Span(a, b)) => {
                let _ = writeln!(out, "  J{a} -- J{b} [label=\"{}\"];", e.name);
            }
            _ => {}
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig1_dot_mentions_every_element() {
        let net = crate::fixtures::fig1();
        let dot = link_network_dot(&net, "fig1");
        assert!(dot.starts_with("graph \"fig1\" {"));
        for e in net.elements() {
            assert!(dot.contains(&format!("label=\"{}\"", e.name)), "{}", e.name);
        }
        assert!(dot.contains("G76 -- J27"));
        assert!(dot.contains("J20 -- J27"));
    }
}
